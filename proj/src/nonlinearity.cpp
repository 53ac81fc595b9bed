#include "iboopt/nonlinearity.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "iboopt/quadrature.hpp"

namespace iboopt {

namespace {

void check_gamma(double gamma) {
    if (std::isnan(gamma) || gamma <= 0.0) {
        throw std::invalid_argument("IBO gamma must be positive");
    }
}

} // namespace

PAOperatingPoint PAOperatingPoint::from_gamma(double gamma, double sigma2) {
    check_gamma(gamma);
    if (!(sigma2 > 0.0)) throw std::invalid_argument("PAOperatingPoint: sigma2 must be positive");
    return {gamma * sigma2, gamma};
}

PAOperatingPoint PAOperatingPoint::from_p_max(double p_max, double sigma2) {
    if (!(p_max > 0.0)) throw std::invalid_argument("PAOperatingPoint: p_max must be positive");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("PAOperatingPoint: sigma2 must be positive");
    return {p_max, p_max / sigma2};
}

cd soft_limit(cd sample, double p_max) {
    if (std::isnan(p_max) || p_max <= 0.0) {
        throw std::invalid_argument("soft_limit: p_max must be positive");
    }
    const double limit = std::sqrt(p_max);
    const double mag = std::abs(sample);
    if (mag < limit) return sample;
    return sample * (limit / mag);
}

void soft_limit_inplace(std::span<cd> samples, double p_max) {
    if (std::isnan(p_max) || p_max <= 0.0) {
        throw std::invalid_argument("soft_limit: p_max must be positive");
    }
    if (std::isinf(p_max)) return;
    const double limit = std::sqrt(p_max);
    for (auto& s : samples) {
        const double mag = std::abs(s);
        if (mag >= limit) s *= limit / mag;
    }
}

std::vector<cd> soft_limit(std::span<const cd> samples, double p_max) {
    std::vector<cd> out(samples.begin(), samples.end());
    soft_limit_inplace(out, p_max);
    return out;
}

BussgangEstimate estimate_bussgang(std::span<const cd> x, std::span<const cd> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("estimate_bussgang: length mismatch");
    }
    if (x.size() < 2) {
        throw std::invalid_argument("estimate_bussgang: need at least 2 samples");
    }
    cd s_yx{0.0, 0.0};
    double s_xx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s_yx += y[i] * std::conj(x[i]);
        s_xx += std::norm(x[i]);
    }
    if (s_xx <= 0.0) {
        throw std::domain_error("estimate_bussgang: input signal has zero power");
    }
    const cd alpha = s_yx / s_xx;
    cd s_qx{0.0, 0.0};
    double s_qq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const cd q = y[i] - alpha * x[i];
        s_qq += std::norm(q);
        s_qx += q * std::conj(x[i]);
    }
    return {alpha, s_qq / static_cast<double>(x.size()), std::abs(s_qx) / s_xx};
}

double alpha_ofdm(double gamma) {
    check_gamma(gamma);
    if (std::isinf(gamma)) return 1.0;
    const double root = std::sqrt(gamma);
    return 1.0 - std::exp(-gamma) + 0.5 * std::sqrt(std::numbers::pi * gamma) * std::erfc(root);
}

double d_ofdm(double gamma) {
    check_gamma(gamma);
    if (std::isinf(gamma)) return 0.0;
    const double e = std::exp(-gamma);
    const double t = 0.5 * std::sqrt(std::numbers::pi * gamma) * std::erfc(std::sqrt(gamma));
    // (1-e) - ((1-e)+t)^2 rearranged to avoid losing the small difference.
    const double d = (1.0 - e) * e - t * (2.0 * (1.0 - e) + t);
    return d > 0.0 ? d : 0.0;
}

double d_tilde_ofdm(double gamma) { return (2.0 / 3.0) * d_ofdm(gamma); }

double output_power_ofdm(double gamma, double sigma2) {
    check_gamma(gamma);
    if (!(sigma2 > 0.0)) throw std::invalid_argument("output_power_ofdm: sigma2 must be positive");
    if (std::isinf(gamma)) return sigma2;
    return sigma2 * (1.0 - std::exp(-gamma));
}

double alpha_ofdm_deriv(double gamma) {
    check_gamma(gamma);
    if (std::isinf(gamma)) return 0.0;
    const double root = std::sqrt(gamma);
    return 0.5 * std::exp(-gamma) + 0.25 * std::sqrt(std::numbers::pi) * std::erfc(root) / root;
}

double alpha_ofdm_deriv2(double gamma) {
    check_gamma(gamma);
    if (std::isinf(gamma)) return 0.0;
    const double root = std::sqrt(gamma);
    const double e = std::exp(-gamma);
    return -0.5 * e - 0.25 * e / gamma -
           0.125 * std::sqrt(std::numbers::pi) * std::erfc(root) / (gamma * root);
}

double d_ofdm_deriv(double gamma) {
    return std::exp(-gamma) - 2.0 * alpha_ofdm(gamma) * alpha_ofdm_deriv(gamma);
}

double d_ofdm_deriv2(double gamma) {
    const double a = alpha_ofdm(gamma);
    const double a1 = alpha_ofdm_deriv(gamma);
    const double a2 = alpha_ofdm_deriv2(gamma);
    return -std::exp(-gamma) - 2.0 * (a1 * a1 + a * a2);
}

double rayleigh_pdf(double z, double sigma2) {
    if (z < 0.0) return 0.0;
    return 2.0 * z / sigma2 * std::exp(-z * z / sigma2);
}

double rayleigh_upper_limit(double sigma2) {
    // exp(-z^2/sigma^2) < 1e-16  <=>  z > sigma sqrt(16 ln 10)
    return std::sqrt(sigma2) * std::sqrt(16.0 * std::numbers::ln10);
}

namespace {

void check_pdf_inputs(double p_max, double upper_limit) {
    if (!(p_max > 0.0)) throw std::invalid_argument("pdf integral: p_max must be positive");
    if (!(upper_limit > 0.0)) throw std::invalid_argument("pdf integral: upper_limit must be positive");
}

void check_normalization(const std::function<double(double)>& pdf, double upper_limit,
                         double abs_tol) {
    const double mass = integrate(pdf, 0.0, upper_limit, abs_tol);
    if (std::abs(mass - 1.0) > 1e-6) {
        throw std::invalid_argument("pdf integral: density does not integrate to 1");
    }
}

} // namespace

double alpha_by_pdf_integral(const std::function<double(double)>& pdf, double p_max,
                             double sigma2, double upper_limit, double abs_tol) {
    check_pdf_inputs(p_max, upper_limit);
    if (!(sigma2 > 0.0)) throw std::invalid_argument("alpha_by_pdf_integral: sigma2 must be positive");
    check_normalization(pdf, upper_limit, abs_tol);

    const double limit = std::min(std::sqrt(p_max), upper_limit);
    const double below = integrate([&](double z) { return z * z * pdf(z); }, 0.0, limit, abs_tol);
    double above = 0.0;
    if (limit < upper_limit) {
        above = std::sqrt(p_max) *
                integrate([&](double z) { return z * pdf(z); }, limit, upper_limit, abs_tol);
    }
    return (below + above) / sigma2;
}

double output_power_by_pdf_integral(const std::function<double(double)>& pdf, double p_max,
                                    double upper_limit, double abs_tol) {
    check_pdf_inputs(p_max, upper_limit);
    check_normalization(pdf, upper_limit, abs_tol);

    const double limit = std::min(std::sqrt(p_max), upper_limit);
    const double below = integrate([&](double z) { return z * z * pdf(z); }, 0.0, limit, abs_tol);
    double above = 0.0;
    if (limit < upper_limit) {
        above = p_max * integrate(pdf, limit, upper_limit, abs_tol);
    }
    return below + above;
}

} // namespace iboopt
