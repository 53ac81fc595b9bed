#include "iboopt/constellation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace iboopt {

double Constellation::mean_power() const {
    double s = 0.0;
    for (const auto& p : points) s += std::norm(p);
    return s / static_cast<double>(points.size());
}

Constellation make_constellation(ConstellationKind kind, int order) {
    Constellation c;
    c.kind = kind;
    c.order = order;
    if (kind == ConstellationKind::Qam) {
        if (order != 4 && order != 16 && order != 64 && order != 256) {
            throw std::invalid_argument("make_constellation: square QAM order must be 4, 16, 64 or 256");
        }
        const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
        // Es = 2(M-1)/3 for the +/-{1,3,...} grid.
        const double norm = std::sqrt(2.0 * (order - 1) / 3.0);
        c.points.reserve(order);
        for (int i = 0; i < side; ++i) {
            const double re = (2 * i - (side - 1)) / norm;
            for (int q = 0; q < side; ++q) {
                const double im = (2 * q - (side - 1)) / norm;
                c.points.emplace_back(re, im);
            }
        }
    } else {
        if (order < 2) {
            throw std::invalid_argument("make_constellation: PSK order must be >= 2");
        }
        c.points.reserve(order);
        for (int m = 0; m < order; ++m) {
            const double phase = 2.0 * std::numbers::pi * m / order;
            c.points.emplace_back(std::cos(phase), std::sin(phase));
        }
    }
    return c;
}

std::string to_string(ConstellationKind kind) {
    return kind == ConstellationKind::Qam ? "QAM" : "PSK";
}

std::string to_string(const Constellation& c) {
    return to_string(c.kind) + std::to_string(c.order);
}

} // namespace iboopt
