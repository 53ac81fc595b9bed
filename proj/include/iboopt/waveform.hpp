#ifndef IBOOPT_WAVEFORM_HPP
#define IBOOPT_WAVEFORM_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "iboopt/constellation.hpp"
#include "iboopt/fft.hpp"
#include "iboopt/types.hpp"

namespace iboopt {

enum class WaveformKind { Ofdm, Scfdma };

std::string to_string(WaveformKind kind);

/// Contiguous block of N_U subcarrier indices centered near DC:
/// {-ceil(N_U/2), ..., -ceil(N_U/2) + N_U - 1}. Throws when n_u > n or
/// either is non-positive.
std::vector<int> localized_indices(int n, int n_u);

/// Unitary DFT precoding: out_k = (1/sqrt(N_U)) sum_m in_m e^{-j 2 pi m k / N_U}.
/// Preserves total power (Parseval).
std::vector<cd> dft_precode(std::span<const cd> data);

struct WaveformConfig {
    WaveformKind kind;
    int n;                    // IFFT size
    int n_u;                  // occupied subcarriers
    std::vector<int> indices; // unique, ascending, in [-n/2, n/2-1]
    Constellation constellation;
    double sigma2; // mean transmit power E[|x_n|^2]

    /// Default localized mapping (single block around DC).
    static WaveformConfig localized(WaveformKind kind, int n, int n_u,
                                    Constellation constellation, double sigma2 = 1.0);

    void validate() const; // throws std::invalid_argument on any violation
};

struct TimeDomainSymbol {
    std::vector<cd> samples;
};

/// Reusable generator for one waveform configuration. Owns the FFT plan and
/// scratch buffers so the Monte Carlo loop does not allocate per symbol.
/// generate() is deterministic in (config, seed).
class SymbolGenerator {
public:
    explicit SymbolGenerator(WaveformConfig config);

    const WaveformConfig& config() const { return config_; }

    /// Synthesizes one symbol into time (length N). occupied receives the
    /// frequency-domain values actually mapped onto config().indices (length
    /// N_U, already scaled); the full spectrum of the output is
    /// N * occupied on those bins and zero elsewhere.
    void generate(std::uint64_t seed, std::vector<cd>& time, std::vector<cd>& occupied);

    void generate(std::uint64_t seed, std::vector<cd>& time);

private:
    WaveformConfig config_;
    Fft fft_;
    double scale_;
    std::vector<cd> data_;    // constellation draws
    std::vector<cd> precode_twiddle_;
    std::vector<std::size_t> bins_; // wrapped FFT bin per occupied index
};

/// One-shot convenience wrapper over SymbolGenerator.
TimeDomainSymbol generate_symbol(const WaveformConfig& config, std::uint64_t seed);

/// Direct evaluation of the synthesis sum x_n = sum_k d_k e^{j 2 pi n I_k / N}
/// (precoding applied first for SC-FDMA). O(N * N_U); test reference for the
/// FFT path.
std::vector<cd> generate_symbol_direct(const WaveformConfig& config, std::uint64_t seed);

} // namespace iboopt

#endif
