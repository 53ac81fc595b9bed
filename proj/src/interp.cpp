#include "iboopt/interp.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace iboopt {

namespace {

inline double h00(double t) { return (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t); }
inline double h10(double t) { return t * (1.0 - t) * (1.0 - t); }

} // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) {
        throw std::invalid_argument("MonotoneCubic: need >= 2 knots with matching sizes");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x_[i] > x_[i - 1])) {
            throw std::invalid_argument("MonotoneCubic: x must be strictly increasing");
        }
    }
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x_[k + 1] - x_[k];
        d[k] = (y_[k + 1] - y_[k]) / h[k];
    }
    tangent_.resize(n);
    tangent_[0] = d[0];
    tangent_[n - 1] = d[n - 2];
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double prod = d[k] * d[k - 1];
        if (prod > 0.0) {
            const double a = (h[k - 1] + 2.0 * h[k]) / (3.0 * (h[k - 1] + h[k]));
            tangent_[k] = prod / (a * d[k] + (1.0 - a) * d[k - 1]);
        } else {
            tangent_[k] = 0.0; // local extremum
        }
    }
}

double MonotoneCubic::operator()(double xq) const {
    if (xq < x_.front() || xq > x_.back()) {
        throw std::out_of_range("MonotoneCubic: query outside knot range");
    }
    const auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    std::size_t k = static_cast<std::size_t>(it - x_.begin());
    k = (k == 0) ? 0 : k - 1;
    if (k >= x_.size() - 1) k = x_.size() - 2;
    const double h = x_[k + 1] - x_[k];
    const double t = (xq - x_[k]) / h;
    return y_[k] * h00(t) + h * tangent_[k] * h10(t) +
           y_[k + 1] * h00(1.0 - t) - h * tangent_[k + 1] * h10(1.0 - t);
}

} // namespace iboopt
