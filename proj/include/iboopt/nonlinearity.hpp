#ifndef IBOOPT_NONLINEARITY_HPP
#define IBOOPT_NONLINEARITY_HPP

#include <functional>
#include <span>
#include <vector>

#include "iboopt/types.hpp"

namespace iboopt {

/// Soft-limiter operating point. gamma is the input back-off
/// P_MAX / sigma^2 (linear); constructors enforce the identity and reject
/// non-positive values. gamma = +inf is the "no PA" sentinel.
struct PAOperatingPoint {
    double p_max;
    double gamma;

    static PAOperatingPoint from_gamma(double gamma, double sigma2);
    static PAOperatingPoint from_p_max(double p_max, double sigma2);
};

/// Soft limiter: samples with |x| < sqrt(p_max) pass unchanged, larger ones
/// are scaled to magnitude sqrt(p_max) with phase preserved. p_max = +inf is
/// the identity. Throws std::invalid_argument for p_max <= 0.
void soft_limit_inplace(std::span<cd> samples, double p_max);
std::vector<cd> soft_limit(std::span<const cd> samples, double p_max);
cd soft_limit(cd sample, double p_max);

struct BussgangEstimate {
    cd alpha;                    // least-squares linear gain
    double distortion_power;     // mean |y - alpha x|^2
    double residual_correlation; // |sum q x*| / sum |x|^2, diagnostic
};

/// Sample estimate of the decomposition y = alpha x + q with q uncorrelated
/// with x: alpha = sum(y x*) / sum(|x|^2). Requires equal lengths >= 2 and a
/// non-degenerate x (throws std::domain_error on zero input power).
BussgangEstimate estimate_bussgang(std::span<const cd> x, std::span<const cd> y);

/// Closed-form soft-limiter coefficients for a complex-Gaussian (OFDM) input,
/// as functions of the linear IBO gamma. All throw std::invalid_argument for
/// gamma <= 0 (or NaN); gamma = +inf gives the distortion-free limits.
/// erfc is evaluated with std::erfc (glibc libm, correctly rounded to a few ulp).
double alpha_ofdm(double gamma);                       // 1 - e^-g + sqrt(pi g)/2 erfc(sqrt g)
double d_ofdm(double gamma);                           // 1 - e^-g - alpha^2
double d_tilde_ofdm(double gamma);                     // (2/3) d_ofdm
double output_power_ofdm(double gamma, double sigma2); // sigma^2 (1 - e^-g)

/// First/second derivatives of the closed forms in gamma; used by the
/// Newton-Raphson IBO search and validated against finite differences.
double alpha_ofdm_deriv(double gamma);
double alpha_ofdm_deriv2(double gamma);
double d_ofdm_deriv(double gamma);
double d_ofdm_deriv2(double gamma);

/// Rayleigh amplitude density f(z) = 2z/sigma^2 e^{-z^2/sigma^2} and an upper
/// integration limit beyond which its tail is below 1e-16.
double rayleigh_pdf(double z, double sigma2);
double rayleigh_upper_limit(double sigma2);

/// Quadrature evaluation of the linear gain from an amplitude density:
///   alpha = (1/sigma^2) ( int_0^sqrt(P) z^2 f + sqrt(P) int_sqrt(P)^U z f ).
/// The density must integrate to 1 over [0, upper_limit] within 1e-6
/// (std::invalid_argument otherwise). Independent oracle for alpha_ofdm.
double alpha_by_pdf_integral(const std::function<double(double)>& pdf, double p_max,
                             double sigma2, double upper_limit, double abs_tol = 1e-9);

/// Quadrature evaluation of the limiter output power
///   E|y|^2 = int_0^sqrt(P) z^2 f + P int_sqrt(P)^U f.
/// Oracle for output_power_ofdm and, combined with alpha, for d_ofdm.
double output_power_by_pdf_integral(const std::function<double(double)>& pdf, double p_max,
                                    double upper_limit, double abs_tol = 1e-9);

} // namespace iboopt

#endif
