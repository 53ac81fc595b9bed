#ifndef IBOOPT_SNDR_HPP
#define IBOOPT_SNDR_HPP

#include <span>
#include <vector>

#include "iboopt/coeff_table.hpp"
#include "iboopt/interp.hpp"
#include "iboopt/types.hpp"

namespace iboopt {

/// Which distortion coefficient enters the SNDR denominator: the full
/// time-domain power D or the occupied-band share D_tilde.
enum class Band { Time, Inband };

enum class SnrSatDefinition {
    Improved, // noise counted over the occupied band only (default)
    FullBand, // legacy: full-band noise power
};

/// Receiver-side link description. Gains and powers are linear.
struct LinkModel {
    double channel_gain = 1.0; // aggregate |h|^2 over taps
    double noise_power = 1.0;  // E|w|^2 per complex sample, full band
    int n = 0;
    int n_u = 0;
    double p_max = 1.0;

    void validate() const;
};

/// Sum of per-tap mean power gains.
double aggregate_channel(std::span<const cd> taps);
double aggregate_channel(std::span<const double> tap_powers);

/// Saturation SNR of the link, linear scale. The improved definition divides
/// the noise by N/N_U so that only the occupied-band share counts.
double snr_sat(const LinkModel& link, SnrSatDefinition def = SnrSatDefinition::Improved);

/// Inputs of one SNDR evaluation, all linear.
struct SndrQuery {
    cd alpha;
    double d_coeff = 0.0; // >= 0
    double gamma = 1.0;   // > 0
    double snr_sat = 1.0; // > 0
};

/// |alpha|^2 / (d_coeff + gamma/snr_sat), linear.
double sndr_model(const SndrQuery& q);

/// Bussgang coefficients as a function of IBO in dB. Implementations must be
/// safe for concurrent reads.
class CoefficientSource {
public:
    virtual ~CoefficientSource() = default;
    virtual cd alpha(double gamma_db) const = 0;
    virtual double d(double gamma_db) const = 0;
    virtual double d_tilde(double gamma_db) const = 0;
    // Closed forms return an infinite range; tables return their grid edges.
    virtual double min_gamma_db() const = 0;
    virtual double max_gamma_db() const = 0;
};

/// Closed-form coefficients of the complex-Gaussian (OFDM) signal model.
class OfdmClosedForm final : public CoefficientSource {
public:
    cd alpha(double gamma_db) const override;
    double d(double gamma_db) const override;
    double d_tilde(double gamma_db) const override;
    double min_gamma_db() const override;
    double max_gamma_db() const override;
};

/// Monotone-cubic interpolation over a stored coefficient table. The three
/// interpolants are built once up front; values match interpolate() from the
/// table module (same clamping rules).
class TableSource final : public CoefficientSource {
public:
    explicit TableSource(CoefficientTable table);

    cd alpha(double gamma_db) const override;
    double d(double gamma_db) const override;
    double d_tilde(double gamma_db) const override;
    double min_gamma_db() const override;
    double max_gamma_db() const override;

    const CoefficientTable& table() const { return table_; }

private:
    CoefficientTable table_;
    MonotoneCubic alpha_abs_;
    MonotoneCubic d_;
    MonotoneCubic d_tilde_;
};

/// SNDR in dB at one IBO (dB) for the given source and band; snr_sat linear.
double evaluate_sndr_db(const CoefficientSource& source, double gamma_db, double snr_sat_value,
                        Band band);

struct SndrPoint {
    double gamma_db;
    double sndr_db;
};

/// Pointwise sndr_model over an IBO grid; snr_sat_db is the link quality in
/// dB. Range errors from table interpolation propagate.
std::vector<SndrPoint> sndr_curve(const CoefficientSource& source, double snr_sat_db,
                                  std::span<const double> gamma_grid_db, Band band);

} // namespace iboopt

#endif
