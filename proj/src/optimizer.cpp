#include "iboopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "iboopt/nonlinearity.hpp"

namespace iboopt {
namespace {

constexpr double kSearchLoDb = -30.0;
constexpr double kSearchHiDb = 30.0;
constexpr double kTieToleranceDb = 1e-3;
constexpr double kLn10Over10 = 0.23025850929940457;

// Bussgang terms of the OFDM closed form at one point, with the derivatives
// the stationarity condition needs.
struct OfdmTerms {
    double a, a1, a2; // alpha and d/dgamma, d2/dgamma2
    double d, d1, d2;
};

OfdmTerms ofdm_terms(double gamma) {
    OfdmTerms t;
    t.a = alpha_ofdm(gamma);
    t.a1 = alpha_ofdm_deriv(gamma);
    t.a2 = alpha_ofdm_deriv2(gamma);
    t.d = d_ofdm(gamma);
    t.d1 = d_ofdm_deriv(gamma);
    t.d2 = d_ofdm_deriv2(gamma);
    return t;
}

double band_scale(Band band) { return band == Band::Time ? 1.0 : 2.0 / 3.0; }

// SNDR' = N / (cD + gamma/s)^2; Newton runs on the numerator N.
double stationarity(const OfdmTerms& t, double gamma, double s, double c) {
    const double u = c * t.d + gamma / s;
    const double v = c * t.d1 + 1.0 / s;
    return 2.0 * t.a * t.a1 * u - t.a * t.a * v;
}

double stationarity_deriv(const OfdmTerms& t, double gamma, double s, double c) {
    const double u = c * t.d + gamma / s;
    return 2.0 * (t.a1 * t.a1 + t.a * t.a2) * u - c * t.a * t.a * t.d2;
}

double ofdm_sndr_slope(double gamma, double s, double c) {
    const OfdmTerms t = ofdm_terms(gamma);
    const double u = c * t.d + gamma / s;
    return stationarity(t, gamma, s, c) / (u * u);
}

double ofdm_sndr_db(double gamma_db, double s, double c) {
    const double gamma = undb10(gamma_db);
    const double a = alpha_ofdm(gamma);
    return db10(a * a / (c * d_ofdm(gamma) + gamma / s));
}

// Knot range tied with the scan maximum (within kTieToleranceDb), so a flat
// top keeps its full extent inside the refinement bracket and ties resolve
// toward the smallest IBO.
struct ScanTop {
    std::size_t lo;
    std::size_t hi;
};

template <class F>
ScanTop scan_argmax(F&& f, std::span<const double> knots, std::vector<double>& values) {
    values.resize(knots.size());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < knots.size(); ++i) {
        values[i] = f(knots[i]);
        best = std::max(best, values[i]);
    }
    ScanTop top{knots.size(), 0};
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (values[i] >= best - kTieToleranceDb) {
            top.lo = std::min(top.lo, i);
            top.hi = std::max(top.hi, i);
        }
    }
    return top;
}

template <class F>
double golden_max(F&& f, double lo, double hi, double tol_db, int& iterations) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol_db) {
        ++iterations;
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? x1 : x2;
}

// On a numerically flat top, move to the smallest IBO on the plateau.
template <class F>
double settle_left(F&& f, double g, double lo) {
    const double ref = f(g);
    while (g - kTieToleranceDb >= lo && f(g - kTieToleranceDb) >= ref - 1e-9)
        g -= kTieToleranceDb;
    return g;
}

} // namespace

OptimizationResult optimize_ofdm(double snr_sat_value, Band band, double tol) {
    if (!(snr_sat_value > 0.0)) throw std::invalid_argument("optimize_ofdm: snr_sat must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("optimize_ofdm: tol must be > 0");

    const double c = band_scale(band);
    const double s = snr_sat_value;
    auto objective = [&](double g) { return ofdm_sndr_db(g, s, c); };

    std::vector<double> knots;
    for (double g = kSearchLoDb; g <= kSearchHiDb + 1e-9; g += 1.0) knots.push_back(g);
    std::vector<double> values;
    const ScanTop top = scan_argmax(objective, knots, values);
    const std::size_t best = top.lo;

    OptimizationResult res;
    res.method = OptimizeMethod::Newton;

    double g = knots[best];
    bool newton_ok = false;
    for (int it = 0; it < 60; ++it) {
        ++res.iterations;
        const double gamma = undb10(g);
        const OfdmTerms t = ofdm_terms(gamma);
        const double num = stationarity(t, gamma, s, c);
        const double den = stationarity_deriv(t, gamma, s, c) * gamma * kLn10Over10;
        if (!std::isfinite(num) || !std::isfinite(den) || den == 0.0) break;
        const double g_next = g - num / den;
        if (!std::isfinite(g_next) || g_next < kSearchLoDb || g_next > kSearchHiDb) break;
        const double step = std::abs(g_next - g);
        g = g_next;
        if (step < 1e-11) {
            newton_ok = true;
            break;
        }
    }

    // Newton must land on a point at least as good as the scan; otherwise it
    // found the wrong stationary point or ran off, so bracket instead.
    if (newton_ok && objective(g) < values[best] - 1e-9) newton_ok = false;

    if (!newton_ok) {
        res.method = OptimizeMethod::Bracketed;
        const double lo = std::max(kSearchLoDb, knots[top.lo] - 1.5);
        const double hi = std::min(kSearchHiDb, knots[top.hi] + 1.5);
        g = golden_max(objective, lo, hi, 1e-7, res.iterations);
        // Polish so the stationarity tolerance holds when the maximum is
        // interior and smooth.
        for (int it = 0; it < 20; ++it) {
            const double gamma = undb10(g);
            const OfdmTerms t = ofdm_terms(gamma);
            const double num = stationarity(t, gamma, s, c);
            const double den = stationarity_deriv(t, gamma, s, c) * gamma * kLn10Over10;
            if (!std::isfinite(num) || !std::isfinite(den) || den == 0.0) break;
            const double g_next = g - num / den;
            if (!std::isfinite(g_next) || std::abs(g_next - g) > 0.5) break;
            g = g_next;
            if (std::abs(num / den) < 1e-11) break;
        }
    }

    const double slope = ofdm_sndr_slope(undb10(g), s, c);
    res.converged = std::isfinite(slope) && std::abs(slope) < tol;
    if (!res.converged) {
        std::ostringstream msg;
        msg << "optimize_ofdm failed: snr_sat=" << s << " band=" << (band == Band::Time ? "TIME" : "INBAND")
            << " gamma_db=" << g << " |dSNDR/dgamma|=" << std::abs(slope) << " tol=" << tol;
        throw OptimizationError(msg.str());
    }
    res.gamma_opt_db = g;
    res.sndr_opt_db = objective(g);
    return res;
}

OptimizationResult optimize_source(const CoefficientSource& source, double snr_sat_value,
                                   Band band, std::span<const double> knots_db) {
    if (!(snr_sat_value > 0.0)) throw std::invalid_argument("optimize_source: snr_sat must be > 0");
    if (knots_db.size() < 3) throw std::invalid_argument("optimize_source: need at least 3 knots");

    auto objective = [&](double g) { return evaluate_sndr_db(source, g, snr_sat_value, band); };

    std::vector<double> values;
    const ScanTop top = scan_argmax(objective, knots_db, values);
    if (top.lo == 0 || top.hi + 1 == knots_db.size()) {
        std::ostringstream msg;
        msg << "optimize_source: argmax at grid endpoint gamma_db="
            << knots_db[top.lo == 0 ? top.lo : top.hi] << " (grid [" << knots_db.front() << ", "
            << knots_db.back() << "] dB); extend the coefficient grid";
        throw BracketError(msg.str());
    }

    OptimizationResult res;
    res.method = OptimizeMethod::Bracketed;
    const double lo = knots_db[top.lo - 1];
    const double hi = knots_db[top.hi + 1];
    double g = golden_max(objective, lo, hi, 1e-4, res.iterations);
    g = settle_left(objective, g, lo);
    res.gamma_opt_db = g;
    res.sndr_opt_db = objective(g);
    res.converged = true;
    return res;
}

OptimizationResult optimize_table(const CoefficientTable& table, double snr_sat_value, Band band) {
    TableSource source(table);
    return optimize_source(source, snr_sat_value, band, table.gamma_grid_db);
}

std::vector<SweepPoint> optimal_sndr_sweep(const CoefficientSource& source,
                                           std::span<const double> snr_sat_grid_db, Band band) {
    std::vector<double> knots;
    if (const auto* ts = dynamic_cast<const TableSource*>(&source)) {
        knots = ts->table().gamma_grid_db;
    } else {
        for (double g = kSearchLoDb; g <= kSearchHiDb + 1e-9; g += 0.5) knots.push_back(g);
    }

    std::vector<SweepPoint> sweep;
    sweep.reserve(snr_sat_grid_db.size());
    for (double s_db : snr_sat_grid_db) {
        const OptimizationResult r = optimize_source(source, undb10(s_db), band, knots);
        sweep.push_back({s_db, r.gamma_opt_db, r.sndr_opt_db});
    }
    return sweep;
}

LinearFit fit_linear(std::span<const FitPoint> points) {
    if (points.size() < 2) throw std::invalid_argument("fit_linear: need at least 2 points");
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += p.x;
        my += p.y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_linear: all x values identical");

    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (const auto& p : points) {
        const double r = p.y - (fit.slope * p.x + fit.intercept);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

double reference_ibo_db(WaveformKind kind, int order) {
    if (kind == WaveformKind::Ofdm) return 6.0;
    if (kind == WaveformKind::Scfdma && order == 4) return -10.0;
    if (kind == WaveformKind::Scfdma && order == 64) return 2.0;
    throw std::invalid_argument("reference_ibo_db: no reference IBO for this waveform");
}

} // namespace iboopt
