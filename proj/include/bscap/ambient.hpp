#pragma once

// Ambient backscatter: the ambient source's modulation and fading enter as a
// random gain a = ||psi|| / sqrt(N_A) after maximum-ratio combining over N_A
// ambient symbols per tag symbol. Rates follow from the general-load
// capacity evaluated at a^2 rho.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "bscap/capacity.hpp"
#include "bscap/error.hpp"

namespace bscap {

enum class FadingKind { constant_envelope, circular_gaussian, on_off };

// psi with E|psi|^2 = 1.
struct FadingModel {
    FadingKind kind = FadingKind::circular_gaussian;
    double on_prob = 0.5;  // on-off model: P(|psi| > 0)

    static FadingModel constant_envelope() { return {FadingKind::constant_envelope, 1.0}; }
    static FadingModel circular_gaussian() { return {FadingKind::circular_gaussian, 1.0}; }
    static FadingModel on_off(double p) {
        require(p > 0.0 && p <= 1.0, "on probability must lie in (0, 1]");
        return {FadingKind::on_off, p};
    }

    static FadingModel from_name(const std::string& name, double on_prob = 0.5) {
        if (name == "constant" || name == "constant-envelope") return constant_envelope();
        if (name == "gaussian" || name == "rayleigh" || name == "circular-gaussian") return circular_gaussian();
        if (name == "on-off" || name == "onoff") return on_off(on_prob);
        throw InvalidArgument("unknown fading model: " + name);
    }

    std::string name() const {
        switch (kind) {
        case FadingKind::constant_envelope: return "constant-envelope";
        case FadingKind::circular_gaussian: return "circular-gaussian";
        case FadingKind::on_off: return "on-off";
        }
        return "unknown";
    }

    // |psi|^2 drawn directly so the constant-envelope case is exactly 1.
    template <class Rng>
    double sample_power(Rng& rng) const {
        switch (kind) {
        case FadingKind::constant_envelope: return 1.0;
        case FadingKind::circular_gaussian: {
            std::exponential_distribution<double> e(1.0);
            return e(rng);
        }
        case FadingKind::on_off: {
            std::bernoulli_distribution b(on_prob);
            return b(rng) ? 1.0 / on_prob : 0.0;
        }
        }
        return 0.0;
    }

    template <class Rng>
    cplx sample(Rng& rng) const {
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        const double p = sample_power(rng);
        return std::polar(std::sqrt(p), phase(rng));
    }
};

inline unsigned worker_count() {
    if (const char* env = std::getenv("BSCAP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(std::min(v, 256L));
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

inline constexpr std::size_t kBatchSize = 4096;

// Samples of a. Batch b draws from mt19937_64 seeded by {seed, b}, so the
// output does not depend on the number of worker threads.
inline std::vector<double> combined_gain_samples(const FadingModel& f, std::size_t n_ambient, std::size_t n_samples,
                                                 std::uint64_t seed) {
    require(n_ambient >= 1, "N_A must be at least one");
    require(f.kind != FadingKind::on_off || (f.on_prob > 0.0 && f.on_prob <= 1.0), "invalid fading model");
    std::vector<double> out(n_samples);
    const std::size_t batches = (n_samples + kBatchSize - 1) / kBatchSize;
    auto run = [&](std::size_t first, std::size_t stride) {
        for (std::size_t b = first; b < batches; b += stride) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
            std::mt19937_64 rng(seq);
            const std::size_t end = std::min(n_samples, (b + 1) * kBatchSize);
            for (std::size_t i = b * kBatchSize; i < end; ++i) {
                double s = 0.0;
                for (std::size_t k = 0; k < n_ambient; ++k) s += f.sample_power(rng);
                out[i] = std::sqrt(s / static_cast<double>(n_ambient));
            }
        }
    };
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), std::max<std::size_t>(batches, 1)));
    if (workers <= 1) {
        run(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
        for (auto& t : pool) t.join();
    }
    return out;
}

struct ErgodicResult {
    double rate = 0.0;
    double stderr_ = 0.0;
};

namespace detail {

// Kahan-compensated mean and standard error of g(x_i), accumulated as
// offsets from the first value so a constant g gives exactly zero spread.
template <class F>
ErgodicResult mean_with_error(const std::vector<double>& xs, F&& g) {
    require(!xs.empty(), "empty sample set");
    const double shift = g(xs.front());
    double sum = 0.0, c = 0.0, sum2 = 0.0, c2 = 0.0;
    auto add = [](double& s, double& comp, double v) {
        const double y = v - comp;
        const double t = s + y;
        comp = (t - s) - y;
        s = t;
    };
    for (double x : xs) {
        const double v = g(x) - shift;
        add(sum, c, v);
        add(sum2, c2, v * v);
    }
    const double n = static_cast<double>(xs.size());
    const double d = sum / n;
    const double var = xs.size() > 1 ? std::max(0.0, (sum2 - n * d * d) / (n - 1.0)) : 0.0;
    return {shift + d, std::sqrt(var / n)};
}

} // namespace detail

inline ErgodicResult ergodic_capacity(const FadingModel& f, std::size_t n_ambient, Snr rho, std::size_t n_samples,
                                      std::uint64_t seed, const CapacityTable& table) {
    const auto a = combined_gain_samples(f, n_ambient, n_samples, seed);
    const double r = rho.linear();
    return detail::mean_with_error(a, [&](double x) { return table(x * x * r); });
}

// Lower empirical quantile inf{x : F_n(x) >= eps} of the samples.
inline double empirical_quantile(std::vector<double> xs, double eps) {
    require(!xs.empty(), "empty sample set");
    require(eps > 0.0 && eps < 1.0, "outage probability must lie in (0, 1)");
    const auto n = xs.size();
    auto idx = static_cast<std::size_t>(std::ceil(eps * static_cast<double>(n)));
    idx = std::clamp<std::size_t>(idx, 1, n) - 1;
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(idx), xs.end());
    return xs[idx];
}

inline std::vector<double> outage_capacities(const FadingModel& f, std::size_t n_ambient, Snr rho,
                                             const std::vector<double>& eps, std::size_t n_samples,
                                             std::uint64_t seed, const CapacityTable& table) {
    require(n_samples > 0, "empty sample set");
    auto a = combined_gain_samples(f, n_ambient, n_samples, seed);
    for (double& x : a) x *= x;
    std::vector<double> out;
    for (double e : eps) out.push_back(table(rho.linear() * empirical_quantile(a, e)));
    return out;
}

inline double outage_capacity(const FadingModel& f, std::size_t n_ambient, Snr rho, double eps,
                              std::size_t n_samples, std::uint64_t seed, const CapacityTable& table) {
    return outage_capacities(f, n_ambient, rho, {eps}, n_samples, seed, table).front();
}

} // namespace bscap
