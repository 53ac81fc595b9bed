#ifndef IBOOPT_FFT_HPP
#define IBOOPT_FFT_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "iboopt/types.hpp"

namespace iboopt {

/// Fixed-size DFT plan. Transforms are unnormalized:
///   forward:  X_k = sum_n x_n e^{-j 2 pi n k / N}
///   backward: x_n = sum_k X_k e^{+j 2 pi n k / N}
/// so backward(forward(x)) == N * x.
///
/// Power-of-two sizes use an iterative radix-2 decimation-in-time transform
/// with precomputed twiddles; other sizes fall back to a direct O(N^2) sum.
/// A plan holds no mutable state, so one instance may be shared across
/// threads, or built per worker.
class Fft {
public:
    explicit Fft(std::size_t n);

    std::size_t size() const { return n_; }

    void forward(std::span<cd> data) const { transform(data, -1); }
    void backward(std::span<cd> data) const { transform(data, +1); }

private:
    void transform(std::span<cd> data, int sign) const;
    void radix2(std::span<cd> data, int sign) const;
    void direct(std::span<cd> data, int sign) const;

    std::size_t n_;
    bool pow2_;
    std::vector<std::size_t> bitrev_;
    std::vector<cd> twiddle_; // e^{-j 2 pi k / n}, k in [0, n/2)
};

} // namespace iboopt

#endif
