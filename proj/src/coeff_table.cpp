#include "iboopt/coeff_table.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "iboopt/interp.hpp"

namespace iboopt {

WaveformDescriptor describe(const WaveformConfig& config) {
    return {config.kind, config.n, config.n_u, config.constellation.kind, config.constellation.order};
}

void CoefficientTable::validate() const {
    if (gamma_grid_db.empty()) {
        throw std::invalid_argument("CoefficientTable: empty grid");
    }
    if (samples.size() != gamma_grid_db.size()) {
        throw std::invalid_argument("CoefficientTable: one sample per grid point required");
    }
    for (std::size_t i = 0; i < gamma_grid_db.size(); ++i) {
        if (i > 0 && !(gamma_grid_db[i] > gamma_grid_db[i - 1])) {
            throw std::invalid_argument("CoefficientTable: grid must be strictly increasing");
        }
        if (samples[i].gamma_db != gamma_grid_db[i]) {
            throw std::invalid_argument("CoefficientTable: sample gamma mismatch");
        }
        if (samples[i].d < 0.0 || samples[i].d_tilde < 0.0 || samples[i].d_tilde > samples[i].d) {
            throw std::invalid_argument("CoefficientTable: require 0 <= d_tilde <= d");
        }
    }
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void save_table(const CoefficientTable& table, std::ostream& out) {
    table.validate();
    out << "# waveform=" << to_string(table.waveform.kind) << "\n";
    out << "# N=" << table.waveform.n << " N_U=" << table.waveform.n_u << "\n";
    out << "# constellation=" << to_string(table.waveform.constellation_kind)
        << table.waveform.order << "\n";
    out << "# seed=" << table.provenance.master_seed
        << " n_symbols=" << table.provenance.n_symbols << "\n";
    out << "gamma_db,alpha_re,alpha_im,d,d_tilde,stderr_alpha,stderr_d\n";
    for (const auto& s : table.samples) {
        out << fmt_double(s.gamma_db) << ',' << fmt_double(s.alpha.real()) << ','
            << fmt_double(s.alpha.imag()) << ',' << fmt_double(s.d) << ','
            << fmt_double(s.d_tilde) << ',' << fmt_double(s.stderr_alpha) << ','
            << fmt_double(s.stderr_d) << "\n";
    }
}

void save_table(const CoefficientTable& table, const std::filesystem::path& path) {
    std::ostringstream buf;
    save_table(table, buf);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw StorageError("cannot open " + tmp.string() + " for writing");
        f << buf.str();
        if (!f.good()) throw StorageError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw StorageError("rename failed for " + path.string() + ": " + ec.message());
}

namespace {

std::string expect_prefix(const std::string& line, const std::string& prefix) {
    if (line.rfind(prefix, 0) != 0) {
        throw StorageError("load_table: malformed header, expected '" + prefix + "'");
    }
    return line.substr(prefix.size());
}

WaveformKind parse_waveform_kind(const std::string& s) {
    if (s == "OFDM") return WaveformKind::Ofdm;
    if (s == "SCFDMA") return WaveformKind::Scfdma;
    throw StorageError("load_table: unknown waveform '" + s + "'");
}

} // namespace

CoefficientTable load_table(std::istream& in) {
    CoefficientTable table;
    std::string line;

    if (!std::getline(in, line)) throw StorageError("load_table: empty input");
    table.waveform.kind = parse_waveform_kind(expect_prefix(line, "# waveform="));

    if (!std::getline(in, line)) throw StorageError("load_table: truncated header");
    if (std::sscanf(line.c_str(), "# N=%d N_U=%d", &table.waveform.n, &table.waveform.n_u) != 2) {
        throw StorageError("load_table: malformed size header");
    }

    if (!std::getline(in, line)) throw StorageError("load_table: truncated header");
    {
        const std::string c = expect_prefix(line, "# constellation=");
        if (c.rfind("QAM", 0) == 0) {
            table.waveform.constellation_kind = ConstellationKind::Qam;
            table.waveform.order = std::stoi(c.substr(3));
        } else if (c.rfind("PSK", 0) == 0) {
            table.waveform.constellation_kind = ConstellationKind::Psk;
            table.waveform.order = std::stoi(c.substr(3));
        } else {
            throw StorageError("load_table: unknown constellation '" + c + "'");
        }
    }

    if (!std::getline(in, line)) throw StorageError("load_table: truncated header");
    {
        std::uint64_t seed = 0;
        long n_symbols = 0;
        if (std::sscanf(line.c_str(), "# seed=%" SCNu64 " n_symbols=%ld", &seed, &n_symbols) != 2) {
            throw StorageError("load_table: malformed provenance header");
        }
        table.provenance.master_seed = seed;
        table.provenance.n_symbols = n_symbols;
    }

    if (!std::getline(in, line) ||
        line != "gamma_db,alpha_re,alpha_im,d,d_tilde,stderr_alpha,stderr_d") {
        throw StorageError("load_table: missing column header");
    }

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        CoefficientSample s;
        double re = 0.0, im = 0.0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &s.gamma_db, &re, &im, &s.d,
                        &s.d_tilde, &s.stderr_alpha, &s.stderr_d) != 7) {
            throw StorageError("load_table: malformed data row '" + line + "'");
        }
        s.alpha = cd(re, im);
        s.n_symbols = table.provenance.n_symbols;
        table.samples.push_back(s);
        table.gamma_grid_db.push_back(s.gamma_db);
    }
    table.validate();
    return table;
}

CoefficientTable load_table(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw StorageError("cannot open " + path.string());
    return load_table(f);
}

std::string table_cache_key(const WaveformDescriptor& id, std::span<const double> gamma_grid_db,
                            long n_symbols, std::uint64_t seed) {
    std::ostringstream material;
    material << to_string(id.kind) << '|' << id.n << '|' << id.n_u << '|'
             << to_string(id.constellation_kind) << id.order << '|';
    for (double g : gamma_grid_db) material << fmt_double(g) << ';';
    material << '|' << n_symbols << '|' << seed;

    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : material.str()) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

CoefficientSample interpolate(const CoefficientTable& table, double gamma_db) {
    table.validate();
    const auto& grid = table.gamma_grid_db;
    if (gamma_db < grid.front() || gamma_db > grid.back()) {
        throw std::out_of_range("interpolate: gamma outside table range");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] == gamma_db) return table.samples[i];
    }

    std::vector<double> alpha_abs(grid.size()), d(grid.size()), d_tilde(grid.size()),
        se_a(grid.size()), se_d(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        alpha_abs[i] = std::abs(table.samples[i].alpha);
        d[i] = table.samples[i].d;
        d_tilde[i] = table.samples[i].d_tilde;
        se_a[i] = table.samples[i].stderr_alpha;
        se_d[i] = table.samples[i].stderr_d;
    }
    const MonotoneCubic fa(grid, alpha_abs), fd(grid, d), fdt(grid, d_tilde);
    const MonotoneCubic fsa(grid, se_a), fsd(grid, se_d);

    CoefficientSample out;
    out.gamma_db = gamma_db;
    out.alpha = cd(fa(gamma_db), 0.0);
    out.d = std::max(0.0, fd(gamma_db));
    out.d_tilde = std::min(std::max(0.0, fdt(gamma_db)), out.d);
    out.n_symbols = table.provenance.n_symbols;
    out.stderr_alpha = fsa(gamma_db);
    out.stderr_d = fsd(gamma_db);
    return out;
}

TableStore::TableStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw StorageError("cannot create cache directory " + dir_.string() + ": " + ec.message());
}

std::filesystem::path TableStore::path_for(const std::string& key) const {
    return dir_ / (key + ".table");
}

bool TableStore::contains(const std::string& key) const {
    std::error_code ec;
    return std::filesystem::exists(path_for(key), ec);
}

CoefficientTable TableStore::load(const std::string& key) const {
    return load_table(path_for(key));
}

void TableStore::save(const std::string& key, const CoefficientTable& table) const {
    save_table(table, path_for(key));
}

} // namespace iboopt
