#ifndef IBOOPT_COEFF_TABLE_HPP
#define IBOOPT_COEFF_TABLE_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "iboopt/constellation.hpp"
#include "iboopt/types.hpp"
#include "iboopt/waveform.hpp"

namespace iboopt {

struct StorageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WaveformDescriptor {
    WaveformKind kind;
    int n;
    int n_u;
    ConstellationKind constellation_kind;
    int order;

    bool operator==(const WaveformDescriptor&) const = default;
};

WaveformDescriptor describe(const WaveformConfig& config);

/// One Monte Carlo estimate of the Bussgang coefficients at a single IBO.
/// d and d_tilde are the sigma^2-normalized distortion coefficients
/// (total and in-band-only).
struct CoefficientSample {
    double gamma_db = 0.0;
    cd alpha{0.0, 0.0};
    double d = 0.0;
    double d_tilde = 0.0;
    long n_symbols = 0;
    double stderr_alpha = 0.0;
    double stderr_d = 0.0;
};

struct Provenance {
    std::uint64_t master_seed = 0;
    long n_symbols = 0;
    std::string built_at; // informational only, never serialized
};

struct CoefficientTable {
    WaveformDescriptor waveform{};
    std::vector<double> gamma_grid_db;
    std::vector<CoefficientSample> samples;
    Provenance provenance;

    void validate() const; // grid strictly increasing, one sample per knot, d_tilde <= d
};

/// Plain-text serialization: provenance header lines followed by CSV rows.
/// Doubles are written with %.17g so that save/load round-trips exactly and
/// identical tables serialize byte-identically.
void save_table(const CoefficientTable& table, std::ostream& out);
void save_table(const CoefficientTable& table, const std::filesystem::path& path); // StorageError on I/O failure
CoefficientTable load_table(std::istream& in);
CoefficientTable load_table(const std::filesystem::path& path);

/// Cache key: FNV-1a hash over (waveform id, grid, n_symbols, seed).
std::string table_cache_key(const WaveformDescriptor& id, std::span<const double> gamma_grid_db,
                            long n_symbols, std::uint64_t seed);

/// Monotone piecewise-cubic interpolation of |alpha|, d and d_tilde at
/// gamma_db, with d_tilde clamped to d afterwards. No extrapolation: throws
/// std::out_of_range outside the grid.
CoefficientSample interpolate(const CoefficientTable& table, double gamma_db);

/// Directory-backed table cache. Writes are atomic-ish (tmp file + rename);
/// keys are content hashes of the build inputs, so hits are exact.
class TableStore {
public:
    explicit TableStore(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }

    std::filesystem::path path_for(const std::string& key) const;
    bool contains(const std::string& key) const;
    CoefficientTable load(const std::string& key) const;
    void save(const std::string& key, const CoefficientTable& table) const; // StorageError on failure

private:
    std::filesystem::path dir_;
};

} // namespace iboopt

#endif
