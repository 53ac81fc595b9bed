#ifndef IBOOPT_EXPERIMENT_HPP
#define IBOOPT_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "iboopt/sndr.hpp"
#include "iboopt/waveform.hpp"

namespace iboopt {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitValidation = 4;
inline constexpr int kExitStorage = 5;

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    double step = 0.0;

    std::vector<double> expand() const;
    void validate(const char* name) const; // min < max, step > 0
};

struct WaveformSpec {
    WaveformKind kind = WaveformKind::Ofdm;
    int order = 4;

    std::string label() const; // "OFDM", "SCFDMA"
};

enum class BandSelect { Time, Inband, Both };

/// Everything one run needs. Paths stay out of the provenance hash so moving
/// the output directory does not change reported identity.
struct ExperimentConfig {
    std::vector<WaveformSpec> waveforms{{WaveformKind::Ofdm, 4},
                                        {WaveformKind::Scfdma, 4},
                                        {WaveformKind::Scfdma, 64}};
    int n = 512;
    int n_u = 24;
    GridSpec gamma_grid_db{-20.0, 20.0, 0.25};
    GridSpec snr_sat_grid_db{0.0, 40.0, 1.0};
    long n_symbols = 20000;
    std::uint64_t master_seed = 1;
    std::string output_dir = ".";
    std::string cache_dir; // empty: resolved from IBOOPT_CACHE_DIR or output_dir/cache
    BandSelect band = BandSelect::Both;

    void validate() const;
    std::string canonical() const;  // stable text form of the physics fields
    std::string config_hash() const; // 64-bit FNV-1a of canonical(), hex
    std::string resolved_cache_dir() const;
};

WaveformSpec parse_waveform_spec(const std::string& text); // "ofdm", "scfdma:64"
GridSpec parse_grid_spec(const std::string& text);         // "min:max:step"
BandSelect parse_band(const std::string& text);            // "time" | "inband" | "both"

/// Applies `key = value` lines from a config file onto cfg. Unknown keys or
/// malformed values raise invalid_argument naming the key.
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

int cmd_coeffs(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sndr_map(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_optimize(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_validate(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command-line entry point (argv without the program name).
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace iboopt

#endif
