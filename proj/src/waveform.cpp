#include "iboopt/waveform.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace iboopt {

std::string to_string(WaveformKind kind) {
    return kind == WaveformKind::Ofdm ? "OFDM" : "SCFDMA";
}

std::vector<int> localized_indices(int n, int n_u) {
    if (n <= 0 || n_u <= 0) {
        throw std::invalid_argument("localized_indices: sizes must be positive");
    }
    if (n_u > n) {
        throw std::invalid_argument("localized_indices: n_u must not exceed n");
    }
    const int start = -((n_u + 1) / 2); // -ceil(n_u/2)
    std::vector<int> idx(n_u);
    for (int k = 0; k < n_u; ++k) idx[k] = start + k;
    return idx;
}

std::vector<cd> dft_precode(std::span<const cd> data) {
    const std::size_t m = data.size();
    if (m == 0) {
        throw std::invalid_argument("dft_precode: input must be non-empty");
    }
    std::vector<cd> out(m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    const double base = -2.0 * std::numbers::pi / static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k) {
        cd acc{0.0, 0.0};
        for (std::size_t j = 0; j < m; ++j) {
            const double phase = base * static_cast<double>((j * k) % m);
            acc += data[j] * cd(std::cos(phase), std::sin(phase));
        }
        out[k] = acc * scale;
    }
    return out;
}

WaveformConfig WaveformConfig::localized(WaveformKind kind, int n, int n_u,
                                         Constellation constellation, double sigma2) {
    WaveformConfig cfg;
    cfg.kind = kind;
    cfg.n = n;
    cfg.n_u = n_u;
    cfg.indices = localized_indices(n, n_u);
    cfg.constellation = std::move(constellation);
    cfg.sigma2 = sigma2;
    cfg.validate();
    return cfg;
}

void WaveformConfig::validate() const {
    if (n <= 0) throw std::invalid_argument("WaveformConfig: n must be positive");
    if (n_u <= 0 || n_u > n) throw std::invalid_argument("WaveformConfig: require 0 < n_u <= n");
    if (static_cast<int>(indices.size()) != n_u) {
        throw std::invalid_argument("WaveformConfig: indices size must equal n_u");
    }
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] < -n / 2 || indices[i] > n / 2 - 1) {
            throw std::invalid_argument("WaveformConfig: subcarrier index out of [-n/2, n/2-1]");
        }
        if (i > 0 && indices[i] <= indices[i - 1]) {
            throw std::invalid_argument("WaveformConfig: indices must be unique and ascending");
        }
    }
    if (constellation.points.empty()) {
        throw std::invalid_argument("WaveformConfig: empty constellation");
    }
    if (!(sigma2 > 0.0)) {
        throw std::invalid_argument("WaveformConfig: sigma2 must be positive");
    }
}

SymbolGenerator::SymbolGenerator(WaveformConfig config)
    : config_(std::move(config)), fft_(static_cast<std::size_t>(config_.n)) {
    config_.validate();
    scale_ = std::sqrt(config_.sigma2 / static_cast<double>(config_.n_u));
    data_.resize(config_.n_u);
    bins_.resize(config_.n_u);
    for (int k = 0; k < config_.n_u; ++k) {
        const int idx = config_.indices[k];
        bins_[k] = static_cast<std::size_t>(idx >= 0 ? idx : idx + config_.n);
    }
    if (config_.kind == WaveformKind::Scfdma) {
        precode_twiddle_.resize(config_.n_u);
        const double base = -2.0 * std::numbers::pi / static_cast<double>(config_.n_u);
        for (int m = 0; m < config_.n_u; ++m) {
            precode_twiddle_[m] = cd(std::cos(base * m), std::sin(base * m));
        }
    }
}

void SymbolGenerator::generate(std::uint64_t seed, std::vector<cd>& time, std::vector<cd>& occupied) {
    std::mt19937_64 rng(seed);
    const auto& pts = config_.constellation.points;
    const std::uint64_t order = pts.size();
    for (auto& d : data_) {
        d = pts[static_cast<std::size_t>(rng() % order)];
    }

    occupied.resize(config_.n_u);
    if (config_.kind == WaveformKind::Scfdma) {
        const std::size_t m = static_cast<std::size_t>(config_.n_u);
        const double precode_scale = scale_ / std::sqrt(static_cast<double>(m));
        for (std::size_t k = 0; k < m; ++k) {
            cd acc{0.0, 0.0};
            for (std::size_t j = 0; j < m; ++j) {
                acc += data_[j] * precode_twiddle_[(j * k) % m];
            }
            occupied[k] = acc * precode_scale;
        }
    } else {
        for (int k = 0; k < config_.n_u; ++k) occupied[k] = data_[k] * scale_;
    }

    time.assign(static_cast<std::size_t>(config_.n), cd{0.0, 0.0});
    for (int k = 0; k < config_.n_u; ++k) time[bins_[k]] = occupied[k];
    fft_.backward(time);
}

void SymbolGenerator::generate(std::uint64_t seed, std::vector<cd>& time) {
    std::vector<cd> occupied;
    generate(seed, time, occupied);
}

TimeDomainSymbol generate_symbol(const WaveformConfig& config, std::uint64_t seed) {
    SymbolGenerator gen(config);
    TimeDomainSymbol sym;
    gen.generate(seed, sym.samples);
    return sym;
}

std::vector<cd> generate_symbol_direct(const WaveformConfig& config, std::uint64_t seed) {
    config.validate();
    std::mt19937_64 rng(seed);
    const auto& pts = config.constellation.points;
    std::vector<cd> data(config.n_u);
    for (auto& d : data) d = pts[static_cast<std::size_t>(rng() % pts.size())];

    if (config.kind == WaveformKind::Scfdma) {
        data = dft_precode(data);
    }
    const double scale = std::sqrt(config.sigma2 / static_cast<double>(config.n_u));
    std::vector<cd> x(static_cast<std::size_t>(config.n), cd{0.0, 0.0});
    for (int n = 0; n < config.n; ++n) {
        cd acc{0.0, 0.0};
        for (int k = 0; k < config.n_u; ++k) {
            const double phase = 2.0 * std::numbers::pi * static_cast<double>(n) *
                                 static_cast<double>(config.indices[k]) / static_cast<double>(config.n);
            acc += data[k] * cd(std::cos(phase), std::sin(phase));
        }
        x[n] = acc * scale;
    }
    return x;
}

} // namespace iboopt
