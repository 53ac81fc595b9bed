#include "iboopt/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "iboopt/fft.hpp"
#include "iboopt/nonlinearity.hpp"
#include "iboopt/types.hpp"

namespace iboopt {
namespace {

constexpr int kBatches = 20;

std::vector<std::size_t> wrapped_bins(const WaveformConfig& config) {
    std::vector<std::size_t> bins(config.indices.size());
    for (std::size_t k = 0; k < bins.size(); ++k) {
        int idx = config.indices[k];
        bins[k] = static_cast<std::size_t>(idx >= 0 ? idx : idx + config.n);
    }
    return bins;
}

// Sums of conjugate products, time domain and occupied band. The in-band x
// spectrum is known without a transform: bin b_k of the size-N forward DFT of
// the synthesized symbol is N * occupied[k].
struct Sums {
    cd yx{};
    double xx = 0.0;
    double yy = 0.0;
    cd yx_ib{};
    double xx_ib = 0.0;
    double yy_ib = 0.0;

    void operator+=(const Sums& o) {
        yx += o.yx;
        xx += o.xx;
        yy += o.yy;
        yx_ib += o.yx_ib;
        xx_ib += o.xx_ib;
        yy_ib += o.yy_ib;
    }
};

// Residual energy sum_|y - alpha x|^2 expanded through the accumulated sums.
double residual(const cd& alpha, const cd& syx, double sxx, double syy) {
    double r = syy - 2.0 * (std::conj(alpha) * syx).real() + std::norm(alpha) * sxx;
    return std::max(r, 0.0);
}

CoefficientSample finish_point(const WaveformConfig& config, double gamma_db,
                               const std::vector<Sums>& batches, long n_symbols) {
    Sums total;
    for (const auto& b : batches) total += b;

    if (total.xx <= 0.0) throw std::runtime_error("estimate_point: zero input power");

    const cd alpha = total.yx / total.xx;
    const double samples = static_cast<double>(n_symbols) * static_cast<double>(config.n);

    const double t = residual(alpha, total.yx, total.xx, total.yy);
    const double d = t / (samples * config.sigma2);

    const double e_ib = residual(alpha, total.yx_ib, total.xx_ib, total.yy_ib);
    double fraction = 0.0;
    if (t > 0.0) fraction = std::clamp(e_ib / (static_cast<double>(config.n) * t), 0.0, 1.0);
    const double d_tilde = d * fraction;

    // Batch means for the standard errors. Each batch repeats the pooled
    // estimator on its own sums.
    std::vector<cd> alpha_b;
    std::vector<double> d_b;
    alpha_b.reserve(batches.size());
    d_b.reserve(batches.size());
    const double batch_symbols = static_cast<double>(n_symbols) / static_cast<double>(batches.size());
    for (const auto& b : batches) {
        if (b.xx <= 0.0) continue;
        cd a = b.yx / b.xx;
        alpha_b.push_back(a);
        d_b.push_back(residual(a, b.yx, b.xx, b.yy) /
                      (batch_symbols * static_cast<double>(config.n) * config.sigma2));
    }

    double stderr_alpha = 0.0;
    double stderr_d = 0.0;
    if (alpha_b.size() >= 2) {
        const double nb = static_cast<double>(alpha_b.size());
        cd ma{};
        double md = 0.0;
        for (std::size_t i = 0; i < alpha_b.size(); ++i) {
            ma += alpha_b[i];
            md += d_b[i];
        }
        ma /= nb;
        md /= nb;
        double va = 0.0;
        double vd = 0.0;
        for (std::size_t i = 0; i < alpha_b.size(); ++i) {
            va += std::norm(alpha_b[i] - ma);
            vd += (d_b[i] - md) * (d_b[i] - md);
        }
        stderr_alpha = std::sqrt(va / (nb - 1.0) / nb);
        stderr_d = std::sqrt(vd / (nb - 1.0) / nb);
    }

    CoefficientSample out;
    out.gamma_db = gamma_db;
    out.alpha = alpha;
    out.d = d;
    out.d_tilde = d_tilde;
    out.n_symbols = n_symbols;
    out.stderr_alpha = stderr_alpha;
    out.stderr_d = stderr_d;
    return out;
}

} // namespace

CoefficientSample estimate_point(const WaveformConfig& config, double gamma_db, long n_symbols,
                                 std::uint64_t seed) {
    config.validate();
    if (n_symbols < 100) throw std::invalid_argument("estimate_point: need at least 100 symbols");

    const double p_max = undb10(gamma_db) * config.sigma2;
    const auto bins = wrapped_bins(config);
    const double nd = static_cast<double>(config.n);

    SymbolGenerator gen(config);
    Fft fft(static_cast<std::size_t>(config.n));
    std::vector<cd> x;
    std::vector<cd> occupied;
    std::vector<cd> y;

    std::vector<Sums> batches(kBatches);
    for (long j = 0; j < n_symbols; ++j) {
        gen.generate(derive_seed(seed, static_cast<std::uint64_t>(j)), x, occupied);
        y = x;
        soft_limit_inplace(y, p_max);

        Sums& b = batches[static_cast<std::size_t>(j * kBatches / n_symbols)];
        for (std::size_t i = 0; i < x.size(); ++i) {
            b.yx += y[i] * std::conj(x[i]);
            b.xx += std::norm(x[i]);
            b.yy += std::norm(y[i]);
        }

        fft.forward(y); // y now holds the clipped symbol's spectrum
        for (std::size_t k = 0; k < bins.size(); ++k) {
            const cd xk = nd * occupied[k];
            const cd yk = y[bins[k]];
            b.yx_ib += yk * std::conj(xk);
            b.xx_ib += std::norm(xk);
            b.yy_ib += std::norm(yk);
        }
    }

    return finish_point(config, gamma_db, batches, n_symbols);
}

CoefficientTable build_table(const WaveformConfig& config, std::span<const double> gamma_grid_db,
                             long n_symbols, std::uint64_t seed) {
    config.validate();
    if (gamma_grid_db.empty()) throw std::invalid_argument("build_table: empty gamma grid");
    for (std::size_t i = 1; i < gamma_grid_db.size(); ++i) {
        if (!(gamma_grid_db[i] > gamma_grid_db[i - 1]))
            throw std::invalid_argument("build_table: gamma grid must be strictly increasing");
    }

    const std::size_t n_points = gamma_grid_db.size();
    std::vector<CoefficientSample> samples(n_points);
    std::vector<std::exception_ptr> errors(n_points);

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::size_t n_workers = std::min<std::size_t>(hw, n_points);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_points) return;
            try {
                samples[i] = estimate_point(config, gamma_grid_db[i], n_symbols,
                                            derive_seed(seed, static_cast<std::uint64_t>(i)));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    CoefficientTable table;
    table.waveform = describe(config);
    table.gamma_grid_db.assign(gamma_grid_db.begin(), gamma_grid_db.end());
    table.samples = std::move(samples);
    table.provenance.master_seed = seed;
    table.provenance.n_symbols = n_symbols;
    table.validate();
    return table;
}

CoefficientTable build_table_cached(const WaveformConfig& config,
                                    std::span<const double> gamma_grid_db, long n_symbols,
                                    std::uint64_t seed, const TableStore& store,
                                    std::string* storage_warning) {
    const std::string key = table_cache_key(describe(config), gamma_grid_db, n_symbols, seed);
    if (store.contains(key)) {
        try {
            CoefficientTable cached = store.load(key);
            if (cached.waveform == describe(config) &&
                std::equal(cached.gamma_grid_db.begin(), cached.gamma_grid_db.end(),
                           gamma_grid_db.begin(), gamma_grid_db.end()))
                return cached;
        } catch (const StorageError&) {
            // unreadable cache entry: fall through and recompute
        }
    }

    CoefficientTable table = build_table(config, gamma_grid_db, n_symbols, seed);
    try {
        store.save(key, table);
    } catch (const StorageError& e) {
        if (!storage_warning) throw;
        *storage_warning = e.what();
    }
    return table;
}

namespace {

struct LinkSums {
    cd yx{};
    double xx = 0.0;
    double xx_ib = 0.0;
    cd zx_ib{};
    double zz_ib = 0.0;
};

double link_sndr(const std::vector<LinkSums>& batches, std::span<const std::size_t> pick) {
    cd yx{};
    double xx = 0.0;
    double xx_ib = 0.0;
    cd zx_ib{};
    double zz_ib = 0.0;
    for (std::size_t i : pick) {
        const LinkSums& b = batches[i];
        yx += b.yx;
        xx += b.xx;
        xx_ib += b.xx_ib;
        zx_ib += b.zx_ib;
        zz_ib += b.zz_ib;
    }
    const cd alpha = yx / xx;
    const double wanted = std::norm(alpha) * xx_ib;
    const double resid =
        std::max(zz_ib - 2.0 * (std::conj(alpha) * zx_ib).real() + std::norm(alpha) * xx_ib, 0.0);
    if (resid <= 0.0) return std::numeric_limits<double>::infinity();
    return db10(wanted / resid);
}

} // namespace

LinkValidation validate_link(const WaveformConfig& config, double gamma_db, double snr_sat_db,
                             long n_symbols, std::uint64_t seed) {
    config.validate();
    if (n_symbols < 100) throw std::invalid_argument("validate_link: need at least 100 symbols");

    const double gamma = undb10(gamma_db);
    const double p_max = gamma * config.sigma2;
    const double snr_sat = undb10(snr_sat_db);
    // Improved saturation SNR counts only the in-band share of the noise:
    // SNR_SAT = P_MAX / ((N_U/N) E|w|^2), so per-sample noise power is
    const double noise_power = p_max * static_cast<double>(config.n) /
                               (static_cast<double>(config.n_u) * snr_sat);

    const auto bins = wrapped_bins(config);
    const double nd = static_cast<double>(config.n);

    SymbolGenerator gen(config);
    Fft fft(static_cast<std::size_t>(config.n));
    std::vector<cd> x;
    std::vector<cd> occupied;
    std::vector<cd> z;

    std::vector<LinkSums> batches(kBatches);
    const double noise_scale = std::sqrt(noise_power / 2.0);
    for (long j = 0; j < n_symbols; ++j) {
        const std::uint64_t sj = static_cast<std::uint64_t>(j);
        gen.generate(derive_seed(seed, 2 * sj), x, occupied);
        z = x;
        soft_limit_inplace(z, p_max);

        LinkSums& b = batches[static_cast<std::size_t>(j * kBatches / n_symbols)];
        for (std::size_t i = 0; i < x.size(); ++i) {
            b.yx += z[i] * std::conj(x[i]);
            b.xx += std::norm(x[i]);
        }

        // Box-Muller noise from the symbol's own noise stream.
        std::mt19937_64 nrng(derive_seed(seed, 2 * sj + 1));
        auto uniform01 = [&nrng] {
            return static_cast<double>(nrng() >> 11) * 0x1.0p-53 + 0x1.0p-54;
        };
        for (auto& zi : z) {
            const double u1 = uniform01();
            const double u2 = uniform01();
            const double r = noise_scale * std::sqrt(-2.0 * std::log(u1));
            const double ph = 2.0 * M_PI * u2;
            zi += cd(r * std::cos(ph), r * std::sin(ph));
        }

        fft.forward(z); // z now holds the received symbol's spectrum
        for (std::size_t k = 0; k < bins.size(); ++k) {
            const cd xk = nd * occupied[k];
            const cd zk = z[bins[k]];
            b.xx_ib += std::norm(xk);
            b.zx_ib += zk * std::conj(xk);
            b.zz_ib += std::norm(zk);
        }
    }

    std::vector<std::size_t> all(batches.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    LinkValidation out;
    out.sndr_db = link_sndr(batches, all);

    // Bootstrap over batches for the confidence half-width.
    constexpr int kResamples = 200;
    std::mt19937_64 brng(derive_seed(seed, 0xB007u));
    std::vector<std::size_t> pick(batches.size());
    std::vector<double> reps;
    reps.reserve(kResamples);
    for (int r = 0; r < kResamples; ++r) {
        for (auto& p : pick) p = static_cast<std::size_t>(brng() % batches.size());
        const double v = link_sndr(batches, pick);
        if (std::isfinite(v)) reps.push_back(v);
    }
    double half = 0.0;
    if (reps.size() >= 2) {
        double m = 0.0;
        for (double v : reps) m += v;
        m /= static_cast<double>(reps.size());
        double var = 0.0;
        for (double v : reps) var += (v - m) * (v - m);
        var /= static_cast<double>(reps.size()) - 1.0;
        half = 3.0 * std::sqrt(var);
    }
    out.half_width_db = half;
    out.model_gap_db = 0.0;
    return out;
}

} // namespace iboopt
