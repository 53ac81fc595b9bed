#ifndef IBOOPT_MONTECARLO_HPP
#define IBOOPT_MONTECARLO_HPP

#include <cstdint>
#include <span>

#include "iboopt/coeff_table.hpp"
#include "iboopt/waveform.hpp"

namespace iboopt {

/// Monte Carlo estimate of (alpha, D, D_tilde) at one IBO point.
///
/// Generates n_symbols symbols, clips at P_MAX = gamma sigma^2, and pools the
/// Bussgang estimator over every sample (ratio of sums). D is the residual
/// power over sigma^2; D_tilde scales D by the fraction of residual energy
/// falling on the occupied subcarriers of the size-N spectrum. Standard
/// errors come from 20 batch means. Per-symbol seeds are
/// derive_seed(seed, symbol_index). Requires n_symbols >= 100.
CoefficientSample estimate_point(const WaveformConfig& config, double gamma_db, long n_symbols,
                                 std::uint64_t seed);

/// One estimate_point per grid value, with per-point seeds
/// derive_seed(seed, point_index). Points are estimated concurrently; the
/// result is assembled in grid order, so it is reproducible regardless of
/// scheduling. The grid must be non-empty and strictly increasing.
CoefficientTable build_table(const WaveformConfig& config, std::span<const double> gamma_grid_db,
                             long n_symbols, std::uint64_t seed);

/// build_table backed by a TableStore. A cached table with the same
/// (waveform, grid, n_symbols, seed) key is loaded instead of recomputed;
/// fresh results are saved back. A failed cache write does not lose the
/// computation: the table is still returned and the failure reported through
/// storage_warning when given, rethrown otherwise.
CoefficientTable build_table_cached(const WaveformConfig& config,
                                    std::span<const double> gamma_grid_db, long n_symbols,
                                    std::uint64_t seed, const TableStore& store,
                                    std::string* storage_warning = nullptr);

struct LinkValidation {
    double sndr_db;       // measured in-band SNDR
    double half_width_db; // 3-sigma bootstrap half-width
    double model_gap_db;  // reserved for callers; not filled here
};

/// End-to-end measurement: x -> soft limiter -> unit flat channel -> white
/// noise sized from the improved SNR_SAT definition (noise counted over the
/// occupied band only). Returns the SNDR measured on the occupied
/// subcarriers, |alpha|^2-weighted wanted power over residual power, with a
/// bootstrap (200 resamples over batches) 3-sigma half-width.
LinkValidation validate_link(const WaveformConfig& config, double gamma_db, double snr_sat_db,
                             long n_symbols, std::uint64_t seed);

} // namespace iboopt

#endif
