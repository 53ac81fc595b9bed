#ifndef IBOOPT_INTERP_HPP
#define IBOOPT_INTERP_HPP

#include <vector>

namespace iboopt {

/// Monotonicity-preserving piecewise-cubic Hermite interpolation with
/// Fritsch-Butland tangents (SIAM J Sci Stat Comput 5, 300, 1984).
/// Reproduces the knots exactly and never overshoots monotone data.
class MonotoneCubic {
public:
    /// x strictly increasing, same length as y, length >= 2.
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    /// Evaluates at xq; throws std::out_of_range outside [x.front(), x.back()].
    double operator()(double xq) const;

    double min_x() const { return x_.front(); }
    double max_x() const { return x_.back(); }

private:
    std::vector<double> x_, y_, tangent_;
};

} // namespace iboopt

#endif
