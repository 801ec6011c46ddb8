#pragma once

// Switched lumped-element loads: a bank of parallel switched capacitors
// (plus a fixed susceptance b0) in series with a chain of switched resistors.
// All values are normalized to the antenna resistance. Each of the 2^L
// switch words yields one reflection coefficient.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bscap/core_model.hpp"
#include "bscap/error.hpp"
#include "bscap/input_laws.hpp"
#include "bscap/mi_engine.hpp"
#include "bscap/optimize.hpp"

namespace bscap {

struct SwitchedLoadTopology {
    std::size_t n_caps = 0;
    std::size_t n_res = 0;

    std::size_t switches() const { return n_caps + n_res; }
    std::size_t states() const { return std::size_t{1} << switches(); }
    void validate() const {
        require(switches() >= 1, "topology needs at least one switch");
        require(switches() <= 16, "topology has too many switches");
    }
};

struct ComponentValues {
    double b0 = 0.0;                  // fixed susceptance, either sign
    std::vector<double> caps;         // switched susceptances, > 0
    std::vector<double> res;          // switched resistances, >= 0

    void validate(const SwitchedLoadTopology& t) const {
        require(caps.size() == t.n_caps && res.size() == t.n_res, "component counts do not match the topology");
        require(std::isfinite(b0), "fixed susceptance must be finite");
        for (double b : caps) require(std::isfinite(b), "susceptances must be finite");
        for (double r : res) require(r >= 0.0 && std::isfinite(r), "resistances must be nonnegative");
    }
};

// Switch word bit i < n_caps toggles capacitor i, bit n_caps + j resistor j.
struct SwitchState {
    double b = 0.0;
    double r = 0.0;
};

inline SwitchState switch_state(const SwitchedLoadTopology& t, const ComponentValues& v, std::size_t word) {
    SwitchState s{v.b0, 0.0};
    for (std::size_t i = 0; i < t.n_caps; ++i)
        if (word >> i & 1U) s.b += v.caps[i];
    for (std::size_t j = 0; j < t.n_res; ++j)
        if (word >> (t.n_caps + j) & 1U) s.r += v.res[j];
    return s;
}

// z = r + 1/(j b); with zero susceptance the capacitor bank is an open
// circuit and the state maps to Gamma = 1.
inline cplx state_gamma(double b, double r) {
    const cplx den(r * b + b, -1.0);
    return cplx(r * b - b, -1.0) / den;
}

inline std::vector<cplx> circuit_gammas(const SwitchedLoadTopology& t, const ComponentValues& v) {
    t.validate();
    v.validate(t);
    std::vector<cplx> out(t.states());
    for (std::size_t w = 0; w < out.size(); ++w) {
        const auto s = switch_state(t, v, w);
        cplx g = state_gamma(s.b, s.r);
        if (std::abs(g) > 1.0) g /= std::abs(g);  // rounding only; passive by construction
        out[w] = g;
    }
    return out;
}

inline DiscreteConstellation enumerate_constellation(const SwitchedLoadTopology& t, const ComponentValues& v) {
    return DiscreteConstellation::uniform(circuit_gammas(t, v));
}

struct CircuitDesign {
    SwitchedLoadTopology topology;
    ComponentValues values;
    std::vector<double> probs;
    Snr design_snr;
    double mi_bpcu = 0.0;
    bool converged = false;
    std::string message;
    std::uint64_t seed = 0;

    DiscreteConstellation constellation() const {
        return DiscreteConstellation(circuit_gammas(topology, values), probs, 1e-9);
    }
};

struct CircuitOptions {
    int starts = 16;
    int optimize_order = 6;          // Gauss-Hermite order inside the optimizer
    int final_order = ComplexDiscreteEvaluator::kPanelRule;
    int max_iterations = 3000;
    std::optional<CircuitDesign> warm_start;  // may have fewer components
};

namespace detail {

// Parameter vector: [b0, log caps..., log res..., logits of states 1..M-1].
struct CircuitCodec {
    SwitchedLoadTopology t;

    std::size_t size() const { return 1 + t.n_caps + t.n_res + t.states() - 1; }

    ComponentValues values(std::span<const double> x) const {
        ComponentValues v;
        v.b0 = x[0];
        for (std::size_t i = 0; i < t.n_caps; ++i) v.caps.push_back(std::exp(x[1 + i]));
        for (std::size_t j = 0; j < t.n_res; ++j) v.res.push_back(std::exp(x[1 + t.n_caps + j]));
        return v;
    }

    std::vector<double> probs(std::span<const double> x) const {
        return opt::softmax_tail(x.subspan(1 + t.n_caps + t.n_res));
    }

    std::vector<double> encode(const ComponentValues& v, const std::vector<double>& p) const {
        std::vector<double> x(size());
        x[0] = v.b0;
        for (std::size_t i = 0; i < t.n_caps; ++i) x[1 + i] = std::log(std::max(v.caps[i], 1e-300));
        for (std::size_t j = 0; j < t.n_res; ++j) x[1 + t.n_caps + j] = std::log(std::max(v.res[j], 1e-300));
        const std::size_t off = 1 + t.n_caps + t.n_res;
        for (std::size_t w = 1; w < p.size(); ++w)
            x[off + w - 1] = std::clamp(std::log(std::max(p[w], 1e-300) / std::max(p[0], 1e-300)), -60.0, 60.0);
        return x;
    }

    void bounds(std::vector<double>& lo, std::vector<double>& hi) const {
        lo.assign(size(), -60.0);
        hi.assign(size(), 60.0);
        lo[0] = -1e4;
        hi[0] = 1e4;
        for (std::size_t i = 1; i < 1 + t.n_caps + t.n_res; ++i) {
            lo[i] = -30.0;
            hi[i] = 30.0;
        }
    }
};

} // namespace detail

// Negative MI and its gradient in the codec's parameters.
inline double circuit_objective(const detail::CircuitCodec& codec, const ComplexDiscreteEvaluator& ev,
                                std::span<const double> x, std::span<double> grad) {
    const auto& t = codec.t;
    const auto v = codec.values(x);
    const auto p = codec.probs(x);
    std::vector<cplx> pts(t.states());
    std::vector<cplx> den2(t.states());
    std::vector<SwitchState> st(t.states());
    for (std::size_t w = 0; w < pts.size(); ++w) {
        st[w] = switch_state(t, v, w);
        const cplx den(st[w].r * st[w].b + st[w].b, -1.0);
        den2[w] = den * den;
        pts[w] = cplx(st[w].r * st[w].b - st[w].b, -1.0) / den;
    }
    const auto r = ev.evaluate(pts, p, !grad.empty());
    if (grad.empty()) return -r.mi;
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t w = 0; w < pts.size(); ++w) {
        const cplx g = r.d_point[w];
        const double di_db = (std::conj(g) * (cplx(0.0, 2.0) / den2[w])).real();
        const double di_dr = (std::conj(g) * (2.0 * st[w].b * st[w].b / den2[w])).real();
        grad[0] -= di_db;
        for (std::size_t i = 0; i < t.n_caps; ++i)
            if (w >> i & 1U) grad[1 + i] -= di_db * v.caps[i];
        for (std::size_t j = 0; j < t.n_res; ++j)
            if (w >> (t.n_caps + j) & 1U) grad[1 + t.n_caps + j] -= di_dr * v.res[j];
    }
    std::vector<double> dl(pts.size() - 1);
    opt::softmax_tail_gradient(p, r.d_prob, dl);
    const std::size_t off = 1 + t.n_caps + t.n_res;
    for (std::size_t k = 0; k < dl.size(); ++k) grad[off + k] = -dl[k];
    return -r.mi;
}

namespace detail {

// Random start: states spread in phase via b = tan(phi), resistor values
// log-uniform on [0.05, 5].
inline ComponentValues random_values(const SwitchedLoadTopology& t, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ComponentValues v;
    const double lo = -std::numbers::pi / 2.0 * (0.6 + 0.35 * u(rng));
    v.b0 = std::tan(lo);
    const double span = -2.0 * v.b0 * (0.5 + u(rng));
    double weight = 1.0, total = 0.0;
    std::vector<double> raw;
    for (std::size_t i = 0; i < t.n_caps; ++i) {
        raw.push_back(weight * std::exp(0.4 * (u(rng) - 0.5)));
        total += raw.back();
        weight *= 1.6 + 0.8 * u(rng);
    }
    for (double w : raw) v.caps.push_back(span * w / total);
    for (std::size_t j = 0; j < t.n_res; ++j) v.res.push_back(0.05 * std::pow(100.0, u(rng)));
    return v;
}

// Lifts a smaller design into a larger topology: missing elements start
// (almost) inert and each old state's probability is split evenly among
// the states that now coincide with it.
inline std::pair<ComponentValues, std::vector<double>> embed(const CircuitDesign& d, const SwitchedLoadTopology& t) {
    const auto& s = d.topology;
    require(s.n_caps <= t.n_caps && s.n_res <= t.n_res, "warm start must not have more components");
    ComponentValues v;
    v.b0 = d.values.b0;
    v.caps = d.values.caps;
    v.res = d.values.res;
    v.caps.resize(t.n_caps, 1e-9);
    v.res.resize(t.n_res, 1e-9);
    const double split = static_cast<double>(std::size_t{1} << (t.switches() - s.switches()));
    std::vector<double> p(t.states());
    for (std::size_t w = 0; w < p.size(); ++w) {
        const std::size_t caps_bits = w & ((std::size_t{1} << t.n_caps) - 1);
        const std::size_t res_bits = w >> t.n_caps;
        const std::size_t old_caps = caps_bits & ((std::size_t{1} << s.n_caps) - 1);
        const std::size_t old_res = res_bits & ((std::size_t{1} << s.n_res) - 1);
        p[w] = d.probs[old_caps | (old_res << s.n_caps)] / split;
    }
    return {std::move(v), std::move(p)};
}

inline CircuitDesign finish(const SwitchedLoadTopology& t, Snr rho, const ComponentValues& v,
                            const std::vector<double>& p, int order) {
    CircuitDesign d{t, v, p, rho, 0.0, false, {}, 0};
    d.mi_bpcu = mi_complex_discrete(d.constellation(), rho, order);
    return d;
}

} // namespace detail

// One local optimization from the given start.
inline CircuitDesign optimize_circuit_from(const SwitchedLoadTopology& t, Snr rho, const ComponentValues& v0,
                                          const std::vector<double>& p0, const CircuitOptions& opts = {}) {
    t.validate();
    v0.validate(t);
    require(p0.size() == t.states(), "probability count must equal the state count");
    const detail::CircuitCodec codec{t};
    const ComplexDiscreteEvaluator ev(rho, opts.optimize_order);
    std::vector<double> lo, hi;
    codec.bounds(lo, hi);
    opt::Options o;
    o.max_iterations = opts.max_iterations;
    o.f_tol = 1e-9;
    o.x_tol = 1e-8;
    o.g_tol = 1e-10;
    const auto res = opt::minimize(
        [&](std::span<const double> x, std::span<double> g) { return circuit_objective(codec, ev, x, g); },
        codec.encode(v0, p0), lo, hi, o);
    auto best = detail::finish(t, rho, codec.values(res.x), codec.probs(res.x), opts.final_order);
    best.converged = res.converged;
    best.message = res.message;
    const auto start = detail::finish(t, rho, v0, p0, opts.final_order);
    if (start.mi_bpcu > best.mi_bpcu) {
        // The coarse inner rule misled the optimizer; keep the start.
        best.values = v0;
        best.probs = p0;
        best.mi_bpcu = start.mi_bpcu;
        best.message += "; start retained";
    }
    return best;
}

// Multi-start joint optimization of component values and probabilities.
// Starts use seeds seed, seed+1, ...; a warm start, when given, is tried
// in addition.
inline CircuitDesign optimize_circuit(const SwitchedLoadTopology& t, Snr rho, std::uint64_t seed,
                                      const CircuitOptions& opts = {}) {
    t.validate();
    require(opts.starts >= 1 || opts.warm_start, "at least one start is required");
    std::optional<CircuitDesign> best;
    auto consider = [&](CircuitDesign d, std::uint64_t s) {
        d.seed = s;
        if (!best || d.mi_bpcu > best->mi_bpcu) best = std::move(d);
    };
    if (opts.warm_start) {
        auto [v, p] = detail::embed(*opts.warm_start, t);
        consider(optimize_circuit_from(t, rho, v, p, opts), opts.warm_start->seed);
    }
    const std::vector<double> uniform(t.states(), 1.0 / static_cast<double>(t.states()));
    for (int i = 0; i < opts.starts; ++i) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
        std::mt19937_64 rng(s);
        const auto v = detail::random_values(t, rng);
        consider(optimize_circuit_from(t, rho, v, uniform, opts), s);
    }
    return *best;
}

} // namespace bscap
