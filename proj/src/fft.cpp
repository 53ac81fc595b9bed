#include "iboopt/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace iboopt {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

} // namespace

Fft::Fft(std::size_t n) : n_(n), pow2_(is_pow2(n)) {
    if (n == 0) {
        throw std::invalid_argument("Fft: size must be positive");
    }
    if (pow2_ && n_ > 1) {
        bitrev_.resize(n_);
        std::size_t log2n = 0;
        while ((std::size_t{1} << log2n) < n_) ++log2n;
        for (std::size_t i = 0; i < n_; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < log2n; ++b) {
                r = (r << 1) | ((i >> b) & 1u);
            }
            bitrev_[i] = r;
        }
        twiddle_.resize(n_ / 2);
        for (std::size_t k = 0; k < n_ / 2; ++k) {
            const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_);
            twiddle_[k] = cd(std::cos(phase), std::sin(phase));
        }
    }
}

void Fft::transform(std::span<cd> data, int sign) const {
    if (data.size() != n_) {
        throw std::invalid_argument("Fft: buffer size does not match plan size");
    }
    if (n_ == 1) return;
    if (pow2_) {
        radix2(data, sign);
    } else {
        direct(data, sign);
    }
}

void Fft::radix2(std::span<cd> data, int sign) const {
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j = bitrev_[i];
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n_ / len;
        for (std::size_t base = 0; base < n_; base += len) {
            for (std::size_t k = 0; k < half; ++k) {
                cd w = twiddle_[k * step];
                if (sign > 0) w = std::conj(w);
                const cd u = data[base + k];
                const cd v = data[base + k + half] * w;
                data[base + k] = u + v;
                data[base + k + half] = u - v;
            }
        }
    }
}

void Fft::direct(std::span<cd> data, int sign) const {
    std::vector<cd> out(n_, cd{0.0, 0.0});
    const double base = static_cast<double>(sign) * 2.0 * std::numbers::pi / static_cast<double>(n_);
    for (std::size_t k = 0; k < n_; ++k) {
        cd acc{0.0, 0.0};
        for (std::size_t m = 0; m < n_; ++m) {
            const double phase = base * static_cast<double>((k * m) % n_);
            acc += data[m] * cd(std::cos(phase), std::sin(phase));
        }
        out[k] = acc;
    }
    for (std::size_t k = 0; k < n_; ++k) data[k] = out[k];
}

} // namespace iboopt
