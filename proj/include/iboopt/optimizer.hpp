#ifndef IBOOPT_OPTIMIZER_HPP
#define IBOOPT_OPTIMIZER_HPP

#include <span>
#include <stdexcept>
#include <vector>

#include "iboopt/coeff_table.hpp"
#include "iboopt/sndr.hpp"
#include "iboopt/waveform.hpp"

namespace iboopt {

class OptimizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The argmax fell on a grid endpoint, so no interior bracket exists; the
/// caller must extend the coefficient grid.
class BracketError : public OptimizationError {
public:
    using OptimizationError::OptimizationError;
};

enum class OptimizeMethod { Newton, Bracketed };

struct OptimizationResult {
    double gamma_opt_db = 0.0;
    double sndr_opt_db = 0.0;
    OptimizeMethod method = OptimizeMethod::Bracketed;
    int iterations = 0;
    bool converged = false;
};

/// Maximizes the closed-form OFDM SNDR over the IBO. Newton-Raphson on the
/// analytic stationarity condition, iterated in the dB domain from the best
/// knot of a 1 dB scan of [-30, 30] dB; golden-section fallback when Newton
/// leaves the interval or stalls. On return |dSNDR/dgamma| < tol (linear
/// units). snr_sat_value is linear.
OptimizationResult optimize_ofdm(double snr_sat_value, Band band, double tol = 1e-6);

/// Bracketed maximization over any coefficient source: coarse scan of the
/// given knots, then golden-section refinement of the interior bracket.
/// Throws BracketError when an endpoint knot is the argmax.
OptimizationResult optimize_source(const CoefficientSource& source, double snr_sat_value,
                                   Band band, std::span<const double> knots_db);

/// optimize_source over the table's own grid.
OptimizationResult optimize_table(const CoefficientTable& table, double snr_sat_value, Band band);

struct SweepPoint {
    double snr_sat_db;
    double gamma_opt_db;
    double sndr_opt_db;
};

/// One bracketed optimization per link-quality grid point. Tables use their
/// own grid as knots; unbounded sources use [-30, 30] dB in 0.5 dB steps.
std::vector<SweepPoint> optimal_sndr_sweep(const CoefficientSource& source,
                                           std::span<const double> snr_sat_grid_db, Band band);

struct LinearFit {
    double slope = 0.0;    // dB per dB
    double intercept = 0.0; // dB
    double rms_residual = 0.0;
};

struct FitPoint {
    double x;
    double y;
};

/// Ordinary least squares in dB-dB space.
LinearFit fit_linear(std::span<const FitPoint> points);

/// Fixed reference IBO in dB: OFDM 6, SC-FDMA QPSK -10, SC-FDMA 64-QAM 2.
double reference_ibo_db(WaveformKind kind, int order);

} // namespace iboopt

#endif
