#include "iboopt/sndr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "iboopt/nonlinearity.hpp"

namespace iboopt {

void LinkModel::validate() const {
    if (!(channel_gain >= 0.0)) throw std::invalid_argument("LinkModel: channel_gain must be >= 0");
    if (!(noise_power > 0.0)) throw std::invalid_argument("LinkModel: noise_power must be > 0");
    if (n <= 0 || n_u <= 0 || n_u > n) throw std::invalid_argument("LinkModel: need 0 < n_u <= n");
    if (!(p_max > 0.0)) throw std::invalid_argument("LinkModel: p_max must be > 0");
}

double aggregate_channel(std::span<const cd> taps) {
    if (taps.empty()) throw std::invalid_argument("aggregate_channel: empty tap vector");
    double g = 0.0;
    for (const cd& h : taps) g += std::norm(h);
    return g;
}

double aggregate_channel(std::span<const double> tap_powers) {
    if (tap_powers.empty()) throw std::invalid_argument("aggregate_channel: empty tap vector");
    double g = 0.0;
    for (double p : tap_powers) {
        if (!(p >= 0.0)) throw std::invalid_argument("aggregate_channel: negative tap power");
        g += p;
    }
    return g;
}

double snr_sat(const LinkModel& link, SnrSatDefinition def) {
    link.validate();
    double noise = link.noise_power;
    if (def == SnrSatDefinition::Improved)
        noise *= static_cast<double>(link.n_u) / static_cast<double>(link.n);
    return link.channel_gain * link.p_max / noise;
}

double sndr_model(const SndrQuery& q) {
    if (!(q.d_coeff >= 0.0)) throw std::invalid_argument("sndr_model: d_coeff must be >= 0");
    if (!(q.gamma > 0.0)) throw std::invalid_argument("sndr_model: gamma must be > 0");
    if (!(q.snr_sat > 0.0)) throw std::invalid_argument("sndr_model: snr_sat must be > 0");
    const double den = q.d_coeff + q.gamma / q.snr_sat;
    if (den <= 0.0) return std::numeric_limits<double>::infinity();
    return std::norm(q.alpha) / den;
}

cd OfdmClosedForm::alpha(double gamma_db) const { return cd(alpha_ofdm(undb10(gamma_db)), 0.0); }
double OfdmClosedForm::d(double gamma_db) const { return d_ofdm(undb10(gamma_db)); }
double OfdmClosedForm::d_tilde(double gamma_db) const { return d_tilde_ofdm(undb10(gamma_db)); }
double OfdmClosedForm::min_gamma_db() const { return -std::numeric_limits<double>::infinity(); }
double OfdmClosedForm::max_gamma_db() const { return std::numeric_limits<double>::infinity(); }

namespace {

std::vector<double> sample_column(const CoefficientTable& t, double (*get)(const CoefficientSample&)) {
    std::vector<double> col(t.samples.size());
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = get(t.samples[i]);
    return col;
}

CoefficientTable checked(CoefficientTable t) {
    t.validate();
    return t;
}

} // namespace

TableSource::TableSource(CoefficientTable table)
    : table_(checked(std::move(table))),
      alpha_abs_(table_.gamma_grid_db,
                 sample_column(table_, [](const CoefficientSample& s) { return std::abs(s.alpha); })),
      d_(table_.gamma_grid_db, sample_column(table_, [](const CoefficientSample& s) { return s.d; })),
      d_tilde_(table_.gamma_grid_db,
               sample_column(table_, [](const CoefficientSample& s) { return s.d_tilde; })) {}

cd TableSource::alpha(double gamma_db) const { return cd(alpha_abs_(gamma_db), 0.0); }
double TableSource::d(double gamma_db) const { return std::max(0.0, d_(gamma_db)); }
double TableSource::d_tilde(double gamma_db) const {
    return std::min(std::max(0.0, d_tilde_(gamma_db)), d(gamma_db));
}
double TableSource::min_gamma_db() const { return table_.gamma_grid_db.front(); }
double TableSource::max_gamma_db() const { return table_.gamma_grid_db.back(); }

double evaluate_sndr_db(const CoefficientSource& source, double gamma_db, double snr_sat_value,
                        Band band) {
    SndrQuery q;
    q.alpha = source.alpha(gamma_db);
    q.d_coeff = band == Band::Time ? source.d(gamma_db) : source.d_tilde(gamma_db);
    q.gamma = undb10(gamma_db);
    q.snr_sat = snr_sat_value;
    return db10(sndr_model(q));
}

std::vector<SndrPoint> sndr_curve(const CoefficientSource& source, double snr_sat_db,
                                  std::span<const double> gamma_grid_db, Band band) {
    const double s = undb10(snr_sat_db);
    std::vector<SndrPoint> curve;
    curve.reserve(gamma_grid_db.size());
    for (double g : gamma_grid_db) curve.push_back({g, evaluate_sndr_db(source, g, s, band)});
    return curve;
}

} // namespace iboopt
