#ifndef IBOOPT_CONSTELLATION_HPP
#define IBOOPT_CONSTELLATION_HPP

#include <string>
#include <vector>

#include "iboopt/types.hpp"

namespace iboopt {

enum class ConstellationKind { Qam, Psk };

/// Unit-mean-power symbol alphabet. Only the amplitude statistics matter
/// downstream, so no bit labeling is attached.
struct Constellation {
    ConstellationKind kind;
    int order;
    std::vector<cd> points;

    double mean_power() const;
};

/// Square QAM (M in {4, 16, 64, 256}) or M-ary PSK (M >= 2), normalized to
/// unit mean power. Throws std::invalid_argument for unsupported orders.
Constellation make_constellation(ConstellationKind kind, int order);

std::string to_string(const Constellation& c); // e.g. "QAM64", "PSK8"
std::string to_string(ConstellationKind kind);

} // namespace iboopt

#endif
