#include "iboopt/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "iboopt/montecarlo.hpp"
#include "iboopt/optimizer.hpp"
#include "iboopt/version.hpp"

namespace iboopt {
namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

const char* band_name(Band b) { return b == Band::Time ? "TIME" : "INBAND"; }

std::vector<Band> selected_bands(BandSelect sel) {
    switch (sel) {
    case BandSelect::Time: return {Band::Time};
    case BandSelect::Inband: return {Band::Inband};
    default: return {Band::Time, Band::Inband};
    }
}

WaveformConfig make_waveform_config(const WaveformSpec& spec, const ExperimentConfig& cfg) {
    return WaveformConfig::localized(spec.kind, cfg.n, cfg.n_u,
                                     make_constellation(ConstellationKind::Qam, spec.order), 1.0);
}

// Seed stream per waveform identity, independent of list order.
std::uint64_t waveform_seed(const ExperimentConfig& cfg, const WaveformSpec& spec) {
    const std::uint64_t stream =
        static_cast<std::uint64_t>(spec.kind == WaveformKind::Scfdma ? 1000 : 0) +
        static_cast<std::uint64_t>(spec.order);
    return derive_seed(cfg.master_seed, stream);
}

void write_provenance(std::ostream& out, const ExperimentConfig& cfg) {
    out << "# tool=" << kToolName << " version=" << kToolVersion << "\n";
    out << "# config=" << cfg.config_hash() << " seed=" << cfg.master_seed << "\n";
}

std::ofstream open_csv(const ExperimentConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.output_dir);
    const fs::path path = fs::path(cfg.output_dir) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot open " + path.string() + " for writing");
    return out;
}

// Coefficient source for one waveform: analytic for OFDM, a measured table
// for SC-FDMA. Figure commands share this choice.
std::unique_ptr<CoefficientSource> make_source(const WaveformSpec& spec,
                                               const ExperimentConfig& cfg,
                                               const TableStore& store, std::string* warning) {
    if (spec.kind == WaveformKind::Ofdm) return std::make_unique<OfdmClosedForm>();
    const WaveformConfig wcfg = make_waveform_config(spec, cfg);
    CoefficientTable table = build_table_cached(wcfg, cfg.gamma_grid_db.expand(), cfg.n_symbols,
                                                waveform_seed(cfg, spec), store, warning);
    return std::make_unique<TableSource>(std::move(table));
}

} // namespace

std::vector<double> GridSpec::expand() const {
    std::vector<double> values;
    const long count = std::lround(std::floor((max - min) / step + 1e-9)) + 1;
    values.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) values.push_back(min + step * static_cast<double>(i));
    return values;
}

void GridSpec::validate(const char* name) const {
    if (!(min < max)) throw std::invalid_argument(std::string(name) + ": min must be < max");
    if (!(step > 0.0)) throw std::invalid_argument(std::string(name) + ": step must be > 0");
}

std::string WaveformSpec::label() const {
    return kind == WaveformKind::Ofdm ? "OFDM" : "SCFDMA";
}

void ExperimentConfig::validate() const {
    if (waveforms.empty()) throw std::invalid_argument("config: waveform list is empty");
    if (n <= 0) throw std::invalid_argument("config: n must be positive");
    if (n_u <= 0 || n_u > n) throw std::invalid_argument("config: need 0 < n_u <= n");
    gamma_grid_db.validate("gamma-grid");
    snr_sat_grid_db.validate("snrsat-grid");
    if (n_symbols < 100) throw std::invalid_argument("config: n_symbols must be >= 100");
    for (const auto& w : waveforms) make_constellation(ConstellationKind::Qam, w.order);
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream s;
    s << "n=" << n << ";n_u=" << n_u;
    s << ";gamma=" << fmt17(gamma_grid_db.min) << ":" << fmt17(gamma_grid_db.max) << ":"
      << fmt17(gamma_grid_db.step);
    s << ";snrsat=" << fmt17(snr_sat_grid_db.min) << ":" << fmt17(snr_sat_grid_db.max) << ":"
      << fmt17(snr_sat_grid_db.step);
    s << ";n_symbols=" << n_symbols << ";seed=" << master_seed;
    s << ";band=" << (band == BandSelect::Time ? "time" : band == BandSelect::Inband ? "inband" : "both");
    s << ";waveforms=";
    for (std::size_t i = 0; i < waveforms.size(); ++i) {
        if (i) s << ",";
        s << waveforms[i].label() << ":" << waveforms[i].order;
    }
    return s.str();
}

std::string ExperimentConfig::config_hash() const {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical())));
    return buf;
}

std::string ExperimentConfig::resolved_cache_dir() const {
    if (!cache_dir.empty()) return cache_dir;
    if (const char* env = std::getenv("IBOOPT_CACHE_DIR"); env && *env) return env;
    return (fs::path(output_dir) / "cache").string();
}

WaveformSpec parse_waveform_spec(const std::string& text) {
    const std::string t = lower(trim(text));
    std::string kind = t;
    int order = 4;
    if (const auto colon = t.find(':'); colon != std::string::npos) {
        kind = t.substr(0, colon);
        const std::string m = t.substr(colon + 1);
        try {
            std::size_t used = 0;
            order = std::stoi(m, &used);
            if (used != m.size()) throw std::invalid_argument(m);
        } catch (const std::exception&) {
            throw std::invalid_argument("waveform '" + text + "': bad constellation order");
        }
    }
    WaveformSpec spec;
    spec.order = order;
    if (kind == "ofdm") {
        spec.kind = WaveformKind::Ofdm;
    } else if (kind == "scfdma" || kind == "sc-fdma") {
        spec.kind = WaveformKind::Scfdma;
    } else {
        throw std::invalid_argument("waveform '" + text + "': unknown kind (want ofdm|scfdma)");
    }
    return spec;
}

GridSpec parse_grid_spec(const std::string& text) {
    GridSpec g;
    double* fields[3] = {&g.min, &g.max, &g.step};
    std::stringstream s(trim(text));
    std::string part;
    for (int i = 0; i < 3; ++i) {
        if (!std::getline(s, part, ':'))
            throw std::invalid_argument("grid '" + text + "': want min:max:step");
        try {
            std::size_t used = 0;
            *fields[i] = std::stod(part, &used);
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw std::invalid_argument("grid '" + text + "': bad number '" + part + "'");
        }
    }
    if (std::getline(s, part, ':'))
        throw std::invalid_argument("grid '" + text + "': want min:max:step");
    return g;
}

BandSelect parse_band(const std::string& text) {
    const std::string t = lower(trim(text));
    if (t == "time") return BandSelect::Time;
    if (t == "inband") return BandSelect::Inband;
    if (t == "both") return BandSelect::Both;
    throw std::invalid_argument("band '" + text + "': want time|inband|both");
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file '" + path + "' is not readable");

    bool waveforms_reset = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config file line " + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "n") {
                cfg.n = std::stoi(value);
            } else if (key == "n_u") {
                cfg.n_u = std::stoi(value);
            } else if (key == "n_symbols") {
                cfg.n_symbols = std::stol(value);
            } else if (key == "seed") {
                cfg.master_seed = std::stoull(value);
            } else if (key == "band") {
                cfg.band = parse_band(value);
            } else if (key == "out_dir") {
                cfg.output_dir = value;
            } else if (key == "cache_dir") {
                cfg.cache_dir = value;
            } else if (key == "gamma_grid") {
                cfg.gamma_grid_db = parse_grid_spec(value);
            } else if (key == "snrsat_grid") {
                cfg.snr_sat_grid_db = parse_grid_spec(value);
            } else if (key == "waveform") {
                if (!waveforms_reset) {
                    cfg.waveforms.clear();
                    waveforms_reset = true;
                }
                cfg.waveforms.push_back(parse_waveform_spec(value));
            } else {
                throw std::invalid_argument("unknown key");
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config key '" + key + "': " + e.what());
        } catch (const std::out_of_range&) {
            throw std::invalid_argument("config key '" + key + "': value out of range");
        }
    }
}

int cmd_coeffs(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    const TableStore store(cfg.resolved_cache_dir());
    const std::vector<double> grid = cfg.gamma_grid_db.expand();

    std::ofstream csv = open_csv(cfg, "fig1_alpha_D.csv");
    write_provenance(csv, cfg);
    csv << "waveform,M,gamma_db,alpha_abs,d_db,d_tilde_db\n";

    int rc = kExitOk;
    for (const auto& spec : cfg.waveforms) {
        const WaveformConfig wcfg = make_waveform_config(spec, cfg);
        std::string warning;
        const CoefficientTable table =
            build_table_cached(wcfg, grid, cfg.n_symbols, waveform_seed(cfg, spec), store, &warning);
        if (!warning.empty()) {
            err << "warning: " << warning << "\n";
            rc = kExitStorage;
        }
        for (const auto& s : table.samples) {
            csv << spec.label() << "," << spec.order << "," << fmt(s.gamma_db) << ","
                << fmt(std::abs(s.alpha)) << "," << fmt(db10(s.d)) << "," << fmt(db10(s.d_tilde))
                << "\n";
        }
    }
    csv.close();
    if (!csv) {
        err << "error: failed writing fig1_alpha_D.csv\n";
        return kExitStorage;
    }
    out << "wrote " << (fs::path(cfg.output_dir) / "fig1_alpha_D.csv").string() << "\n";
    return rc;
}

int cmd_sndr_map(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    const TableStore store(cfg.resolved_cache_dir());
    const std::vector<double> gamma_grid = cfg.gamma_grid_db.expand();
    const std::vector<double> snr_grid = cfg.snr_sat_grid_db.expand();
    const std::vector<Band> bands = selected_bands(cfg.band);

    std::ofstream csv = open_csv(cfg, "fig2_sndr_map.csv");
    write_provenance(csv, cfg);
    csv << "waveform,M,band,snr_sat_db,gamma_db,sndr_db\n";

    int rc = kExitOk;
    for (const auto& spec : cfg.waveforms) {
        std::string warning;
        const auto source = make_source(spec, cfg, store, &warning);
        if (!warning.empty()) {
            err << "warning: " << warning << "\n";
            rc = kExitStorage;
        }
        for (Band band : bands) {
            for (double s_db : snr_grid) {
                const double s = undb10(s_db);
                for (double g_db : gamma_grid) {
                    csv << spec.label() << "," << spec.order << "," << band_name(band) << ","
                        << fmt(s_db) << "," << fmt(g_db) << ","
                        << fmt(evaluate_sndr_db(*source, g_db, s, band)) << "\n";
                }
            }
        }
    }
    csv.close();
    if (!csv) {
        err << "error: failed writing fig2_sndr_map.csv\n";
        return kExitStorage;
    }
    out << "wrote " << (fs::path(cfg.output_dir) / "fig2_sndr_map.csv").string() << "\n";
    return rc;
}

int cmd_optimize(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    const TableStore store(cfg.resolved_cache_dir());
    const std::vector<double> snr_grid = cfg.snr_sat_grid_db.expand();
    const std::vector<Band> bands = selected_bands(cfg.band);

    std::ofstream fig3 = open_csv(cfg, "fig3_opt_ibo.csv");
    write_provenance(fig3, cfg);
    fig3 << "waveform,M,band,snr_sat_db,gamma_opt_db,sndr_opt_db\n";

    std::ofstream fig4 = open_csv(cfg, "fig4_max_sndr.csv");
    write_provenance(fig4, cfg);
    fig4 << "waveform,M,band,snr_sat_db,sndr_opt_db,sndr_ref_db,slope,intercept\n";

    int rc = kExitOk;
    for (const auto& spec : cfg.waveforms) {
        std::string warning;
        const auto source = make_source(spec, cfg, store, &warning);
        if (!warning.empty()) {
            err << "warning: " << warning << "\n";
            rc = kExitStorage;
        }
        const auto* table_source = dynamic_cast<const TableSource*>(source.get());
        const double ref_db = reference_ibo_db(spec.kind, spec.order);

        for (Band band : bands) {
            std::vector<SweepPoint> sweep;
            for (double s_db : snr_grid) {
                try {
                    const OptimizationResult r =
                        spec.kind == WaveformKind::Ofdm
                            ? optimize_ofdm(undb10(s_db), band)
                            : optimize_source(*source, undb10(s_db), band,
                                              table_source->table().gamma_grid_db);
                    sweep.push_back({s_db, r.gamma_opt_db, r.sndr_opt_db});
                } catch (const OptimizationError& e) {
                    err << spec.label() << ":" << spec.order << " " << band_name(band)
                        << " snr_sat_db=" << fmt(s_db) << ": " << e.what() << "\n";
                    rc = kExitNumeric;
                }
            }
            for (const auto& p : sweep) {
                fig3 << spec.label() << "," << spec.order << "," << band_name(band) << ","
                     << fmt(p.snr_sat_db) << "," << fmt(p.gamma_opt_db) << ","
                     << fmt(p.sndr_opt_db) << "\n";
            }
            if (sweep.size() >= 2) {
                std::vector<FitPoint> pts;
                pts.reserve(sweep.size());
                for (const auto& p : sweep) pts.push_back({p.snr_sat_db, p.sndr_opt_db});
                const LinearFit fit = fit_linear(pts);
                for (const auto& p : sweep) {
                    const double ref_sndr =
                        evaluate_sndr_db(*source, ref_db, undb10(p.snr_sat_db), band);
                    fig4 << spec.label() << "," << spec.order << "," << band_name(band) << ","
                         << fmt(p.snr_sat_db) << "," << fmt(p.sndr_opt_db) << "," << fmt(ref_sndr)
                         << "," << fmt(fit.slope) << "," << fmt(fit.intercept) << "\n";
                }
            }
        }
    }
    fig3.close();
    fig4.close();
    if (!fig3 || !fig4) {
        err << "error: failed writing optimizer CSVs\n";
        return kExitStorage;
    }
    out << "wrote " << (fs::path(cfg.output_dir) / "fig3_opt_ibo.csv").string() << "\n";
    out << "wrote " << (fs::path(cfg.output_dir) / "fig4_max_sndr.csv").string() << "\n";
    return rc;
}

int cmd_validate(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    const TableStore store(cfg.resolved_cache_dir());
    const std::vector<double> gamma_grid = cfg.gamma_grid_db.expand();
    const std::vector<double> snr_grid = cfg.snr_sat_grid_db.expand();
    // The link measurement lives on the occupied bins, so the model side must
    // use the in-band coefficient regardless of the band selection.
    const Band band = Band::Inband;
    constexpr double kTolDb = 0.5;

    // Interior quartile knots of each grid give the 3x3 cells.
    auto picks = [](const std::vector<double>& grid) {
        return std::vector<double>{grid[grid.size() / 4], grid[grid.size() / 2],
                                   grid[3 * grid.size() / 4]};
    };
    const std::vector<double> gammas = picks(gamma_grid);
    const std::vector<double> snrs = picks(snr_grid);

    std::ofstream report = open_csv(cfg, "validate_report.txt");
    write_provenance(report, cfg);

    int rc = kExitOk;
    for (const auto& spec : cfg.waveforms) {
        const WaveformConfig wcfg = make_waveform_config(spec, cfg);
        std::string warning;
        const CoefficientTable table = build_table_cached(
            wcfg, gamma_grid, cfg.n_symbols, waveform_seed(cfg, spec), store, &warning);
        if (!warning.empty()) err << "warning: " << warning << "\n";
        const TableSource source(table);

        std::uint64_t cell = 0;
        for (double g_db : gammas) {
            for (double s_db : snrs) {
                const double model_db = evaluate_sndr_db(source, g_db, undb10(s_db), band);
                const LinkValidation lv =
                    validate_link(wcfg, g_db, s_db, cfg.n_symbols,
                                  derive_seed(waveform_seed(cfg, spec), (1ull << 32) + cell));
                ++cell;
                const double diff = std::abs(lv.sndr_db - model_db);
                const char* status = "PASS";
                if (diff > kTolDb + lv.half_width_db) {
                    status = "FAIL";
                    rc = kExitValidation;
                } else if (lv.half_width_db > kTolDb) {
                    status = "LOW-CONFIDENCE";
                }
                std::ostringstream line;
                line << spec.label() << ":" << spec.order << " band=" << band_name(band)
                     << " gamma_db=" << fmt(g_db) << " snrsat_db=" << fmt(s_db)
                     << " measured_db=" << fmt(lv.sndr_db) << " model_db=" << fmt(model_db)
                     << " diff_db=" << fmt(diff) << " halfwidth_db=" << fmt(lv.half_width_db)
                     << " " << status;
                report << line.str() << "\n";
                out << line.str() << "\n";
            }
        }
    }
    report.close();
    out << (rc == kExitOk ? "validation PASSED" : "validation FAILED") << "\n";
    return rc;
}

namespace {

struct FlagSet {
    std::string config_path;
    std::uint64_t seed = 0;
    int n = 0;
    int n_u = 0;
    long n_symbols = 0;
    std::vector<std::string> waveforms;
    std::string band;
    std::string out_dir;
    std::string cache_dir;
    std::string gamma_grid;
    std::string snrsat_grid;
};

// All subcommands share one FlagSet for storage; which flags were actually
// given must be asked of the subcommand that parsed.
void add_common_options(CLI::App* cmd, FlagSet& f) {
    cmd->add_option("--config", f.config_path, "key = value config file");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--n", f.n, "IFFT size");
    cmd->add_option("--n-u", f.n_u, "occupied subcarriers");
    cmd->add_option("--n-symbols", f.n_symbols, "symbols per estimate");
    cmd->add_option("--waveform", f.waveforms, "waveform kind:M (repeatable), e.g. scfdma:64");
    cmd->add_option("--band", f.band, "time|inband|both");
    cmd->add_option("--out-dir", f.out_dir, "output directory");
    cmd->add_option("--cache-dir", f.cache_dir, "coefficient table cache directory");
    cmd->add_option("--gamma-grid", f.gamma_grid, "IBO grid min:max:step (dB)");
    cmd->add_option("--snrsat-grid", f.snrsat_grid, "SNR_SAT grid min:max:step (dB)");
}

ExperimentConfig build_config(const CLI::App& cmd, const FlagSet& f) {
    ExperimentConfig cfg;
    if (cmd.count("--config")) apply_config_file(cfg, f.config_path);
    if (cmd.count("--seed")) cfg.master_seed = f.seed;
    if (cmd.count("--n")) cfg.n = f.n;
    if (cmd.count("--n-u")) cfg.n_u = f.n_u;
    if (cmd.count("--n-symbols")) cfg.n_symbols = f.n_symbols;
    if (cmd.count("--waveform")) {
        cfg.waveforms.clear();
        for (const auto& w : f.waveforms) cfg.waveforms.push_back(parse_waveform_spec(w));
    }
    if (cmd.count("--band")) cfg.band = parse_band(f.band);
    if (cmd.count("--out-dir")) cfg.output_dir = f.out_dir;
    if (cmd.count("--cache-dir")) cfg.cache_dir = f.cache_dir;
    if (cmd.count("--gamma-grid")) cfg.gamma_grid_db = parse_grid_spec(f.gamma_grid);
    if (cmd.count("--snrsat-grid")) cfg.snr_sat_grid_db = parse_grid_spec(f.snrsat_grid);
    cfg.validate();
    return cfg;
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"soft-limiter SNDR study: coefficient tables, SNDR maps, IBO optimization"};
    app.name(kToolName);
    app.require_subcommand(1);

    FlagSet flags;
    CLI::App* coeffs = app.add_subcommand("coeffs", "build coefficient tables and fig1 CSV");
    CLI::App* sndr_map = app.add_subcommand("sndr-map", "evaluate the SNDR map (fig2 CSV)");
    CLI::App* optimize = app.add_subcommand("optimize", "optimal IBO sweeps (fig3/fig4 CSVs)");
    CLI::App* validate = app.add_subcommand("validate", "end-to-end model validation report");
    for (CLI::App* cmd : {coeffs, sndr_map, optimize, validate}) add_common_options(cmd, flags);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    const CLI::App* active = app.get_subcommands().front();
    ExperimentConfig cfg;
    try {
        cfg = build_config(*active, flags);
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (coeffs->parsed()) return cmd_coeffs(cfg, out, err);
        if (sndr_map->parsed()) return cmd_sndr_map(cfg, out, err);
        if (optimize->parsed()) return cmd_optimize(cfg, out, err);
        return cmd_validate(cfg, out, err);
    } catch (const StorageError& e) {
        err << "storage error: " << e.what() << "\n";
        return kExitStorage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

} // namespace iboopt
