// Acceptance suite: end-to-end checks of the coefficient models, the Monte
// Carlo estimator, the IBO optimizer and the command-line artifacts. Each
// criterion prints one PASS/FAIL line; the process exits nonzero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "iboopt/experiment.hpp"
#include "iboopt/montecarlo.hpp"
#include "iboopt/nonlinearity.hpp"
#include "iboopt/optimizer.hpp"
#include "iboopt/quadrature.hpp"
#include "iboopt/sndr.hpp"
#include "iboopt/types.hpp"

using namespace iboopt;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kMasterSeed = 1;
constexpr long kSymbolsBig = 20000;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

WaveformConfig study_config(WaveformKind kind, int order, int n = 512, int n_u = 24,
                            double sigma2 = 1.0) {
    return WaveformConfig::localized(kind, n, n_u,
                                     make_constellation(ConstellationKind::Qam, order), sigma2);
}

std::vector<double> make_grid(double lo, double hi, double step) {
    std::vector<double> g;
    for (double v = lo; v <= hi + 1e-9; v += step) g.push_back(v);
    return g;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) return "<unreadable:" + p.string() + ">";
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

// Deterministic uniforms for the randomized optimizer comparison.
double uniform01(std::uint64_t i) {
    return static_cast<double>(splitmix64(0xACCE5501ull + i) >> 11) * 0x1.0p-53;
}

struct SweepSet {
    std::vector<SweepPoint> time;
    std::vector<SweepPoint> inband;
};

// Tables and sweeps shared between the optimizer-level criteria so the
// expensive Monte Carlo runs happen once.
struct Shared {
    TableStore store{fs::path("acceptance_cache")};
    std::vector<double> snr_grid_db = make_grid(0.0, 40.0, 1.0);

    std::optional<CoefficientTable> qpsk_table;
    std::optional<CoefficientTable> qam64_table;
    std::map<std::string, SweepSet> sweeps;

    const CoefficientTable& table_for(int order) {
        ensure_tables();
        return order == 4 ? *qpsk_table : *qam64_table;
    }

    void ensure_tables() {
        if (qpsk_table && qam64_table) return;
        const std::vector<double> grid = make_grid(-25.0, 15.0, 0.5);
        std::string warn;
        qpsk_table = build_table_cached(study_config(WaveformKind::Scfdma, 4), grid, kSymbolsBig,
                                        derive_seed(kMasterSeed, 1004), store, &warn);
        if (!warn.empty()) std::cerr << "cache warning: " << warn << "\n";
        warn.clear();
        qam64_table = build_table_cached(study_config(WaveformKind::Scfdma, 64), grid, kSymbolsBig,
                                         derive_seed(kMasterSeed, 1064), store, &warn);
        if (!warn.empty()) std::cerr << "cache warning: " << warn << "\n";
    }

    void ensure_sweeps() {
        if (!sweeps.empty()) return;
        ensure_tables();

        SweepSet ofdm;
        for (double s_db : snr_grid_db) {
            const OptimizationResult rt = optimize_ofdm(undb10(s_db), Band::Time);
            const OptimizationResult ri = optimize_ofdm(undb10(s_db), Band::Inband);
            ofdm.time.push_back({s_db, rt.gamma_opt_db, rt.sndr_opt_db});
            ofdm.inband.push_back({s_db, ri.gamma_opt_db, ri.sndr_opt_db});
        }
        sweeps["OFDM"] = std::move(ofdm);

        for (int order : {4, 64}) {
            const CoefficientTable& table = table_for(order);
            const TableSource src(table);
            SweepSet set;
            set.time = optimal_sndr_sweep(src, snr_grid_db, Band::Time);
            set.inband = optimal_sndr_sweep(src, snr_grid_db, Band::Inband);
            sweeps[order == 4 ? "SCFDMA4" : "SCFDMA64"] = std::move(set);
        }
    }
};

// ---------------------------------------------------------------- criteria

bool closed_forms_vs_quadrature(Shared&, std::ostream& detail) {
    const double upper = rayleigh_upper_limit(1.0);
    const auto pdf = [](double z) { return rayleigh_pdf(z, 1.0); };
    double worst_a = 0.0;
    double worst_d = 0.0;
    for (int i = 0; i < 400; ++i) {
        const double g_db = -20.0 + 40.0 * static_cast<double>(i) / 399.0;
        const double gamma = undb10(g_db);
        const double a_quad = alpha_by_pdf_integral(pdf, gamma, 1.0, upper);
        const double p_quad = output_power_by_pdf_integral(pdf, gamma, upper);
        const double d_quad = p_quad - a_quad * a_quad;
        worst_a = std::max(worst_a, std::abs(a_quad - alpha_ofdm(gamma)));
        worst_d = std::max(worst_d, std::abs(d_quad - d_ofdm(gamma)));
    }
    detail << "max |alpha diff| = " << num(worst_a) << ", max |D diff| = " << num(worst_d);
    return worst_a <= 1e-6 && worst_d <= 1e-6;
}

bool monte_carlo_vs_closed_form(Shared&, std::ostream& detail) {
    // The closed forms are the infinite-carrier Gaussian limit; at 256
    // carriers the waveform sits a systematic ~3e-4 away from them (the gap
    // scales as 1/N_U), which dwarfs the statistical error at this sample
    // size. The absolute floor therefore absorbs the model gap while the
    // 3-sigma branch covers runs with fewer symbols.
    const WaveformConfig cfg = study_config(WaveformKind::Ofdm, 4, 512, 256);
    bool ok = true;
    int k = 0;
    for (double g_db : {-5.0, 0.0, 5.0, 10.0}) {
        const CoefficientSample s =
            estimate_point(cfg, g_db, 100000, derive_seed(kMasterSeed, 200 + k++));
        const double gamma = undb10(g_db);
        const double da = std::abs(s.alpha - cd(alpha_ofdm(gamma), 0.0));
        const double dd = std::abs(s.d - d_ofdm(gamma));
        const bool point_ok = da <= std::max(3.0 * s.stderr_alpha, 5e-3) &&
                              dd <= std::max(3.0 * s.stderr_d, 5e-3);
        detail << "[" << num(g_db) << " dB: |da|=" << num(da) << " (3se=" << num(3.0 * s.stderr_alpha)
               << "), |dD|=" << num(dd) << " (3se=" << num(3.0 * s.stderr_d) << ")] ";
        ok = ok && point_ok;
    }
    return ok;
}

bool power_scale_invariance(Shared&, std::ostream& detail) {
    // The normalized distortion cannot be bit-exact across irrational power
    // scalings: sqrt(c)-scaled samples land on the other side of the clip
    // threshold once in ~1e12 comparisons, so proportionality is checked to
    // 1e-11 while alpha keeps the strict 1e-12 bound.
    const CoefficientSample ref =
        estimate_point(study_config(WaveformKind::Ofdm, 4, 128, 32, 1.0), 2.0, 1000, 7);
    bool ok = true;
    for (double c : {0.1, 10.0}) {
        const CoefficientSample s =
            estimate_point(study_config(WaveformKind::Ofdm, 4, 128, 32, c), 2.0, 1000, 7);
        const double da = std::abs(s.alpha - ref.alpha);
        const double rd = std::abs(s.d - ref.d) / ref.d;
        detail << "[sigma2=" << num(c) << ": |dalpha|=" << num(da) << " relD=" << num(rd) << "] ";
        ok = ok && da <= 1e-12 && rd <= 1e-11;
    }
    return ok;
}

bool sdr_at_6db(Shared&, std::ostream& detail) {
    const double gamma = undb10(6.0);
    const double sdr_db = db10(alpha_ofdm(gamma) * alpha_ofdm(gamma) / d_ofdm(gamma));
    detail << "SDR(6 dB) = " << num(sdr_db) << " dB";
    return sdr_db >= 26.0 && sdr_db <= 29.0;
}

bool inband_fraction_ofdm(Shared&, std::ostream& detail) {
    const WaveformConfig cfg = study_config(WaveformKind::Ofdm, 4);
    bool ok = true;
    for (int i = 0; i <= 6; ++i) {
        const double g_db = 2.0 + static_cast<double>(i);
        const CoefficientSample s =
            estimate_point(cfg, g_db, kSymbolsBig, derive_seed(kMasterSeed, 500 + i));
        const double ratio = s.d > 0.0 ? s.d_tilde / s.d : 0.0;
        detail << "[" << num(g_db) << " dB: " << num(ratio) << "] ";
        ok = ok && ratio >= 0.52 && ratio <= 0.82;
    }
    return ok;
}

bool scfdma_distortion_gap(Shared&, std::ostream& detail) {
    const WaveformConfig cfg = study_config(WaveformKind::Scfdma, 4);
    double max_gap_db = -1e300;
    double at_g = 0.0;
    int used = 0;
    for (int i = 0; i <= 32; ++i) {
        const double g_db = -20.0 + static_cast<double>(i);
        const CoefficientSample s =
            estimate_point(cfg, g_db, kSymbolsBig, derive_seed(kMasterSeed, 600 + i));
        // Skip points where the distortion is too small to measure reliably.
        if (!(s.d > 0.0) || !(s.d_tilde > 0.0) || s.stderr_d > 0.1 * s.d) continue;
        ++used;
        const double gap = db10(s.d / s.d_tilde);
        if (gap > max_gap_db) {
            max_gap_db = gap;
            at_g = g_db;
        }
    }
    detail << "max 10log10(D/D_tilde) = " << num(max_gap_db) << " dB at " << num(at_g)
           << " dB IBO over " << used << " usable points";
    return used >= 10 && max_gap_db >= 3.0 && max_gap_db <= 7.0;
}

bool optimal_ibo_properties(Shared& sh, std::ostream& detail) {
    sh.ensure_sweeps();
    std::size_t total = 0;
    std::vector<std::string> errors;
    auto complain = [&](const std::string& m) {
        ++total;
        if (errors.size() < 12) errors.push_back(m);
    };

    for (const auto& [name, set] : sh.sweeps) {
        for (const auto* sweep : {&set.time, &set.inband}) {
            const char* band = sweep == &set.time ? "TIME" : "INBAND";
            if (sweep->size() != sh.snr_grid_db.size()) {
                complain(std::string(name) + " " + band + ": incomplete sweep");
                continue;
            }
            for (std::size_t i = 1; i < sweep->size(); ++i) {
                if (!((*sweep)[i].gamma_opt_db > (*sweep)[i - 1].gamma_opt_db)) {
                    complain(std::string(name) + " " + band + ": gamma_opt not increasing at " +
                             num((*sweep)[i].snr_sat_db) + " dB (" +
                             num((*sweep)[i - 1].gamma_opt_db) + " -> " +
                             num((*sweep)[i].gamma_opt_db) + ")");
                }
            }
            if (!((*sweep)[5].gamma_opt_db < 0.0)) {
                complain(std::string(name) + " " + band + ": gamma_opt at 5 dB is " +
                         num((*sweep)[5].gamma_opt_db));
            }
        }
        // Occupied-band optimum never needs more back-off than the time one.
        for (std::size_t i = 0; i < set.time.size() && i < set.inband.size(); ++i) {
            if (!(set.inband[i].gamma_opt_db <= set.time[i].gamma_opt_db + 0.25)) {
                complain(std::string(name) + ": inband optimum above time optimum at " +
                         num(set.time[i].snr_sat_db) + " dB");
            }
        }
    }
    // Single-carrier style waveforms tolerate less back-off than OFDM.
    const SweepSet& ofdm = sh.sweeps["OFDM"];
    for (const char* name : {"SCFDMA4", "SCFDMA64"}) {
        const SweepSet& sc = sh.sweeps[name];
        for (int b = 0; b < 2; ++b) {
            const std::vector<SweepPoint>& lhs = b == 0 ? sc.time : sc.inband;
            const std::vector<SweepPoint>& rhs = b == 0 ? ofdm.time : ofdm.inband;
            for (std::size_t i = 0; i < lhs.size() && i < rhs.size(); ++i) {
                if (!(lhs[i].gamma_opt_db <= rhs[i].gamma_opt_db + 0.25)) {
                    complain(std::string(name) + (b == 0 ? " TIME" : " INBAND") +
                             ": optimum above OFDM by " +
                             num(lhs[i].gamma_opt_db - rhs[i].gamma_opt_db) + " dB at " +
                             num(lhs[i].snr_sat_db) + " dB");
                }
            }
        }
    }

    if (errors.empty()) {
        detail << "3 waveforms x 2 bands x " << sh.snr_grid_db.size() << " link SNRs";
        return true;
    }
    detail << total << " violations";
    for (const auto& e : errors) detail << "\n    " << e;
    if (total > errors.size()) detail << "\n    ... " << (total - errors.size()) << " more";
    return false;
}

bool optimizer_vs_grid(Shared&, std::ostream& detail) {
    const OfdmClosedForm src;
    const std::vector<double> knots = make_grid(-30.0, 30.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double s_db = 40.0 * uniform01(static_cast<std::uint64_t>(i));
        const double s = undb10(s_db);
        const Band band = (i % 2 == 0) ? Band::Time : Band::Inband;

        double best_g = -25.0;
        double best_v = -1e300;
        for (double g = -25.0; g <= 25.0 + 1e-12; g += 0.01) {
            const double v = evaluate_sndr_db(src, g, s, band);
            if (v > best_v) {
                best_v = v;
                best_g = g;
            }
        }
        const double newton = optimize_ofdm(s, band).gamma_opt_db;
        const double bracketed = optimize_source(src, s, band, knots).gamma_opt_db;
        worst = std::max({worst, std::abs(newton - best_g), std::abs(bracketed - best_g)});
    }
    detail << "worst |gamma - grid argmax| = " << num(worst) << " dB over 50 random link SNRs";
    return worst <= 0.02;
}

bool max_sndr_ordering(Shared& sh, std::ostream& detail) {
    sh.ensure_sweeps();
    std::size_t total = 0;
    std::vector<std::string> errors;
    auto complain = [&](const std::string& m) {
        ++total;
        if (errors.size() < 12) errors.push_back(m);
    };

    const std::vector<SweepPoint>& ofdm = sh.sweeps["OFDM"].inband;
    const std::vector<SweepPoint>& qpsk = sh.sweeps["SCFDMA4"].inband;
    for (std::size_t i = 0; i < ofdm.size() && i < qpsk.size(); ++i) {
        const double gap = qpsk[i].sndr_opt_db - ofdm[i].sndr_opt_db;
        if (gap < -0.1)
            complain("QPSK max SNDR below OFDM by " + num(-gap) + " dB at " +
                     num(qpsk[i].snr_sat_db) + " dB");
        if (gap > 2.5)
            complain("QPSK max SNDR above OFDM by " + num(gap) + " dB at " +
                     num(qpsk[i].snr_sat_db) + " dB");
    }

    // The fixed-back-off curve stays below the optimized one and touches it
    // only around the link SNR whose optimum back-off equals the reference.
    struct Ref {
        const char* key;
        WaveformKind kind;
        int order;
    };
    for (const Ref& r : {Ref{"OFDM", WaveformKind::Ofdm, 4}, Ref{"SCFDMA4", WaveformKind::Scfdma, 4},
                         Ref{"SCFDMA64", WaveformKind::Scfdma, 64}}) {
        const double ref_ibo = reference_ibo_db(r.kind, r.order);
        const OfdmClosedForm closed;
        std::optional<TableSource> table_src;
        const CoefficientSource* src = &closed;
        if (r.kind == WaveformKind::Scfdma) {
            table_src.emplace(sh.table_for(r.order));
            src = &*table_src;
        }
        const std::vector<SweepPoint>& sweep = sh.sweeps[r.key].inband;

        std::vector<std::size_t> near;
        double max_gap = 0.0;
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            const double fixed =
                evaluate_sndr_db(*src, ref_ibo, undb10(sweep[i].snr_sat_db), Band::Inband);
            const double gap = sweep[i].sndr_opt_db - fixed;
            if (gap < -1e-6)
                complain(std::string(r.key) + ": fixed back-off beats the optimum by " +
                         num(-gap) + " dB at " + num(sweep[i].snr_sat_db) + " dB");
            if (gap <= 0.05) near.push_back(i);
            max_gap = std::max(max_gap, gap);
        }
        if (near.empty()) {
            complain(std::string(r.key) + ": fixed curve never touches the optimal one");
        } else if (near.back() - near.front() + 1 != near.size()) {
            complain(std::string(r.key) + ": near-equality set is not one contiguous region");
        }
        if (max_gap <= 0.5)
            complain(std::string(r.key) + ": fixed curve too close everywhere (max gap " +
                     num(max_gap) + " dB)");
    }

    if (errors.empty()) {
        detail << "orderings hold over " << ofdm.size() << " link SNRs";
        return true;
    }
    detail << total << " violations";
    for (const auto& e : errors) detail << "\n    " << e;
    if (total > errors.size()) detail << "\n    ... " << (total - errors.size()) << " more";
    return false;
}

bool linear_max_sndr(Shared& sh, std::ostream& detail) {
    sh.ensure_sweeps();
    bool ok = true;
    for (const auto& [name, set] : sh.sweeps) {
        std::vector<FitPoint> pts;
        pts.reserve(set.inband.size());
        for (const auto& p : set.inband) pts.push_back({p.snr_sat_db, p.sndr_opt_db});
        const LinearFit fit = fit_linear(pts);
        detail << "[" << name << ": rms=" << num(fit.rms_residual)
               << " dB, slope=" << num(fit.slope) << "] ";
        ok = ok && fit.rms_residual < 0.5;
    }
    return ok;
}

bool link_validation(Shared& sh, std::ostream& detail) {
    sh.ensure_tables();
    std::string warn;
    const CoefficientTable ofdm_table =
        build_table_cached(study_config(WaveformKind::Ofdm, 4), std::vector<double>{0.0, 4.0, 8.0},
                           kSymbolsBig, derive_seed(kMasterSeed, 4), sh.store, &warn);
    if (!warn.empty()) std::cerr << "cache warning: " << warn << "\n";

    struct Case {
        const char* name;
        WaveformKind kind;
        int order;
        const CoefficientTable* table;
    };
    const Case cases[] = {{"OFDM", WaveformKind::Ofdm, 4, &ofdm_table},
                          {"SCFDMA4", WaveformKind::Scfdma, 4, &*sh.qpsk_table},
                          {"SCFDMA64", WaveformKind::Scfdma, 64, &*sh.qam64_table}};

    std::vector<std::string> errors;
    double worst = 0.0;
    std::uint64_t cell = 0;
    for (const Case& c : cases) {
        const TableSource src(*c.table);
        const WaveformConfig wcfg = study_config(c.kind, c.order);
        for (double g_db : {0.0, 4.0, 8.0}) {
            for (double s_db : {10.0, 20.0, 30.0}) {
                const double model = evaluate_sndr_db(src, g_db, undb10(s_db), Band::Inband);
                const LinkValidation lv = validate_link(
                    wcfg, g_db, s_db, kSymbolsBig, derive_seed(kMasterSeed, (1ull << 40) + cell));
                ++cell;
                const double diff = std::abs(lv.sndr_db - model);
                worst = std::max(worst, diff);
                if (diff > 0.5 + lv.half_width_db && errors.size() < 8) {
                    errors.push_back(std::string(c.name) + " gamma=" + num(g_db) + " snrsat=" +
                                     num(s_db) + ": measured " + num(lv.sndr_db) + " vs model " +
                                     num(model) + " (halfwidth " + num(lv.half_width_db) + ")");
                }
            }
        }
    }
    detail << "27 cells, worst |measured - model| = " << num(worst) << " dB";
    for (const auto& e : errors) detail << "\n    " << e;
    return errors.empty();
}

bool deterministic_reruns(Shared&, std::ostream& detail) {
    std::random_device rd;
    const fs::path base =
        fs::temp_directory_path() / ("iboopt_accept_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(base);

    ExperimentConfig cfg;
    cfg.waveforms = {{WaveformKind::Ofdm, 4}, {WaveformKind::Scfdma, 4}};
    cfg.n = 64;
    cfg.n_u = 16;
    cfg.n_symbols = 300;
    cfg.gamma_grid_db = {-10.0, 6.0, 2.0};
    cfg.snr_sat_grid_db = {8.0, 16.0, 4.0};
    cfg.band = BandSelect::Inband;

    auto run_into = [&](const std::string& tag) {
        cfg.output_dir = (base / tag).string();
        cfg.cache_dir = (base / ("cache_" + tag)).string();
        std::ostringstream out;
        std::ostringstream err;
        const int rc1 = cmd_coeffs(cfg, out, err);
        const int rc2 = cmd_optimize(cfg, out, err);
        return std::pair<int, int>(rc1, rc2);
    };

    const auto rc_a = run_into("a");
    const auto rc_b = run_into("b");

    bool ok = rc_a == rc_b;
    if (!ok) detail << "exit codes differ";
    for (const char* name : {"fig1_alpha_D.csv", "fig3_opt_ibo.csv", "fig4_max_sndr.csv"}) {
        const std::string a = slurp(base / "a" / name);
        const std::string b = slurp(base / "b" / name);
        if (a != b) {
            ok = false;
            detail << "\n    " << name << " differs between reruns";
        }
    }
    std::size_t tables = 0;
    for (const auto& e : fs::directory_iterator(base / "cache_a")) {
        ++tables;
        const fs::path twin = base / "cache_b" / e.path().filename();
        if (slurp(e.path()) != slurp(twin)) {
            ok = false;
            detail << "\n    table " << e.path().filename().string() << " differs between reruns";
        }
    }
    if (ok) detail << "3 CSVs and " << tables << " coefficient tables byte-identical";

    std::error_code ec;
    fs::remove_all(base, ec);
    return ok;
}

struct Criterion {
    int id;
    const char* title;
    std::function<bool(Shared&, std::ostream&)> run;
};

} // namespace

int main(int argc, char** argv) {
    const Criterion criteria[] = {
        {1, "closed-form coefficients match adaptive quadrature", closed_forms_vs_quadrature},
        {2, "Monte Carlo estimates match the closed forms", monte_carlo_vs_closed_form},
        {3, "estimates invariant under input power scaling", power_scale_invariance},
        {4, "time-domain SDR at 6 dB back-off within [26, 29] dB", sdr_at_6db},
        {5, "OFDM keeps roughly two thirds of distortion in band", inband_fraction_ofdm},
        {6, "SC-FDMA QPSK distortion gap within [3, 7] dB", scfdma_distortion_gap},
        {7, "optimal back-off monotone and ordered across waveforms", optimal_ibo_properties},
        {8, "optimizer matches exhaustive grid search", optimizer_vs_grid},
        {9, "max-SNDR ordering and fixed-back-off tangency", max_sndr_ordering},
        {10, "optimal SNDR nearly linear in link quality", linear_max_sndr},
        {11, "end-to-end link SNDR matches the coefficient model", link_validation},
        {12, "reruns produce byte-identical artifacts", deterministic_reruns},
    };

    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

    Shared shared;
    int failures = 0;
    int ran = 0;
    for (const Criterion& c : criteria) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end())
            continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        std::ostringstream detail;
        bool ok = false;
        try {
            ok = c.run(shared, detail);
        } catch (const std::exception& e) {
            detail << "exception: " << e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!ok) ++failures;
        std::printf("%-4s %2d. %s  (%s) [%.1fs]\n", ok ? "PASS" : "FAIL", c.id, c.title,
                    detail.str().c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", ran - failures, ran);
    return failures == 0 ? 0 : 1;
}
