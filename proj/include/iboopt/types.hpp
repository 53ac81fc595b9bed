#ifndef IBOOPT_TYPES_HPP
#define IBOOPT_TYPES_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace iboopt {

using cd = std::complex<double>;

inline double db10(double x) { return 10.0 * std::log10(x); }
inline double undb10(double x_db) { return std::pow(10.0, x_db / 10.0); }

// SplitMix64 finalizer. Used as the mixing primitive of the seeding scheme:
// every derived stream is obtained as
//   derive_seed(parent, stream) = mix(mix(parent + C) ^ mix(stream + 1))
// so that (master seed, point index, symbol index) maps to an independent
// mt19937_64 seed regardless of evaluation order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
    return splitmix64(splitmix64(parent) ^ splitmix64(stream + 1));
}

} // namespace iboopt

#endif
