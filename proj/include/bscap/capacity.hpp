#pragma once

// Capacity of the unit-disk channel for general passive, purely reactive and
// purely resistive loads, the uniform-disk rate, and the closed-form bounds.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "bscap/error.hpp"
#include "bscap/input_laws.hpp"
#include "bscap/mi_engine.hpp"
#include "bscap/optimize.hpp"

namespace bscap {

enum class ClosedForm { uniform_disk };

using InputLaw = std::variant<std::monostate, DauipDistribution, RealConstellation, ClosedForm>;

struct CapacityPoint {
    Snr snr;
    double rate = 0.0;
    InputLaw input_law;
    bool converged = true;
    std::string message;
};

struct SweepConfig {
    double snr_db_start = 0.0;
    double snr_db_end = 25.0;
    double step_db = 0.1;
    double ppm_keep_threshold = 1e-6;
    double trial_prob_fraction = 0.01;
    // Allows starting above the single-circle region at the caller's risk.
    bool allow_high_start = false;

    void validate() const {
        require(step_db > 0.0 && std::isfinite(step_db), "step must be positive");
        require(snr_db_start <= snr_db_end, "sweep start must not exceed its end");
        require(allow_high_start || snr_db_start <= 4.8, "sweep must start at or below 4.8 dB");
        require(ppm_keep_threshold >= 0.0, "keep threshold must be nonnegative");
        require(trial_prob_fraction > 0.0 && trial_prob_fraction < 1.0, "trial fraction must be in (0, 1)");
    }

    std::vector<double> grid() const {
        validate();
        std::vector<double> g;
        const auto n = static_cast<long>(std::floor((snr_db_end - snr_db_start) / step_db + 1e-9));
        for (long i = 0; i <= n; ++i) g.push_back(snr_db_start + static_cast<double>(i) * step_db);
        return g;
    }
};

struct Bounds {
    double awgn;            // log2(1 + rho)
    double low_snr;         // rho log2 e
    double complex_epi;     // log2(1 + rho / e)
    double real_epi;        // 1/2 log2(1 + 4 rho / (pi e))
    double real_awgn;       // 1/2 log2(1 + 2 rho)
    double reactive_asym;   // 1/2 log2(4 pi rho / e)
    double half_low_snr;    // rho/2 log2 e
};

inline Bounds bounds(Snr rho) {
    const double r = rho.linear();
    const double e = std::numbers::e, pi = std::numbers::pi;
    return {std::log2(1.0 + r),
            r * kLog2e,
            std::log2(1.0 + r / e),
            0.5 * std::log2(1.0 + 4.0 * r / (pi * e)),
            0.5 * std::log2(1.0 + 2.0 * r),
            0.5 * std::log2(4.0 * pi * r / e),
            0.5 * r * kLog2e};
}

inline CapacityPoint capacity_reactive(Snr rho) {
    auto d = DauipDistribution::unit_circle();
    const double rate = mi_dauip(d, rho);
    return {rho, rate, std::move(d), true, {}};
}

inline CapacityPoint rate_uniform_disk(Snr rho) {
    const double rate = mi_uip([rho](double b) { return radius_pdf_uniform_disk(b, rho); }, rho, 1e-12);
    return {rho, std::max(0.0, rate), ClosedForm::uniform_disk, true, {}};
}

// ---------------------------------------------------------------------------
// Concentric-circle optimization with a fixed number of circles.

struct CircleState {
    std::vector<double> sq_radii;  // a_k^2, first entry pinned to 1
    std::vector<double> probs;
};

struct CircleFit {
    CircleState state;
    double mi = 0.0;
    bool converged = false;
    std::string message;
};

namespace detail {

inline opt::Options capacity_options() {
    opt::Options o;
    o.f_tol = 1e-9;
    o.x_tol = 1e-8;
    o.g_tol = 1e-12;
    o.max_iterations = 3000;
    return o;
}

// Variables: u_2..u_K in [0, 1], then logits s_2..s_K relative to p_1.
inline CircleFit optimize_circles(const DauipEvaluator& ev, const CircleState& init) {
    const std::size_t k = init.sq_radii.size();
    require(k >= 1 && init.probs.size() == k, "circle state sizes disagree");
    const std::size_t nr = k - 1;
    std::vector<double> x(2 * nr), lo(2 * nr), hi(2 * nr);
    for (std::size_t i = 0; i < nr; ++i) {
        x[i] = std::clamp(init.sq_radii[i + 1], 0.0, 1.0);
        lo[i] = 0.0;
        hi[i] = 1.0;
        x[nr + i] = std::log(init.probs[i + 1] / init.probs[0]);
        lo[nr + i] = -60.0;
        hi[nr + i] = 60.0;
    }
    auto unpack = [&](std::span<const double> v, std::vector<double>& u, std::vector<double>& p) {
        u.assign(k, 1.0);
        for (std::size_t i = 0; i < nr; ++i) u[i + 1] = v[i];
        p = opt::softmax_tail(v.subspan(nr));
    };
    auto fg = [&](std::span<const double> v, std::span<double> g) {
        std::vector<double> u, p;
        unpack(v, u, p);
        const auto r = ev.evaluate(u, p, true);
        for (std::size_t i = 0; i < nr; ++i) g[i] = -r.d_sq_radius[i + 1];
        std::vector<double> dl(nr);
        opt::softmax_tail_gradient(p, r.d_prob, dl);
        for (std::size_t i = 0; i < nr; ++i) g[nr + i] = -dl[i];
        return -r.mi;
    };
    const auto res = opt::minimize(fg, x, lo, hi, capacity_options());
    CircleFit fit;
    unpack(res.x, fit.state.sq_radii, fit.state.probs);
    fit.mi = -res.f;
    fit.converged = res.converged;
    fit.message = res.message;
    return fit;
}

inline DauipDistribution to_distribution(const CircleState& s) {
    std::vector<double> radii(s.sq_radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) radii[i] = std::sqrt(std::clamp(s.sq_radii[i], 0.0, 1.0));
    return DauipDistribution::from_raw(std::move(radii), s.probs);
}

inline CircleState from_distribution(const DauipDistribution& d) {
    CircleState s;
    for (double a : d.radii()) s.sq_radii.push_back(a * a);
    s.probs = d.probs();
    return s;
}

} // namespace detail

// Best concentric-circle law with exactly K circles (used when a design needs
// a prescribed ring count). Initialized with evenly spaced radii and
// probabilities proportional to the radius.
inline CircleFit optimize_circles_fixed_k(Snr rho, std::size_t k) {
    require(k >= 1, "circle count must be at least one");
    CircleState init;
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double a = 1.0 - static_cast<double>(i) / static_cast<double>(k);
        init.sq_radii.push_back(a * a);
        init.probs.push_back(a);
        total += a;
    }
    for (double& p : init.probs) p /= total;
    return detail::optimize_circles(DauipEvaluator(rho), init);
}

// ---------------------------------------------------------------------------
// General passive load: warm-started sweep with trial circles.

// Sweeps an explicit increasing list of SNRs (dB), each point warm-started
// from the previous one.
inline std::vector<CapacityPoint> capacity_general_sweep_points(const std::vector<double>& grid,
                                                                const SweepConfig& cfg = {}) {
    require(!grid.empty(), "sweep grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i) require(grid[i] > grid[i - 1], "sweep grid must be increasing");
    require(cfg.allow_high_start || grid.front() <= 4.8, "sweep must start at or below 4.8 dB");
    std::vector<CapacityPoint> out;
    out.reserve(grid.size());
    CircleState state{{1.0}, {1.0}};
    for (double db : grid) {
        const Snr rho = Snr::from_db(db);
        const DauipEvaluator ev(rho);
        CircleFit best = detail::optimize_circles(ev, state);
        // Try further circles at the origin while they pay off.
        for (int extra = 0; extra < 64; ++extra) {
            CircleState trial = best.state;
            trial.sq_radii.push_back(0.0);
            trial.probs.push_back(cfg.trial_prob_fraction * trial.probs.front());
            trial.probs = detail::normalized(trial.probs);
            CircleFit grown = detail::optimize_circles(ev, trial);
            if (!(grown.mi >= best.mi * (1.0 + cfg.ppm_keep_threshold))) break;
            best = std::move(grown);
        }
        // A collapsed pair of circles or a vanishing mass is folded away.
        auto law = detail::to_distribution(best.state);
        state = detail::from_distribution(law);
        CapacityPoint pt{rho, best.mi, std::move(law), best.converged, {}};
        if (!best.converged) {
            std::ostringstream msg;
            msg << "optimizer did not converge at " << db << " dB: " << best.message;
            pt.message = msg.str();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

inline std::vector<CapacityPoint> capacity_general_sweep(const SweepConfig& cfg) {
    return capacity_general_sweep_points(cfg.grid(), cfg);
}

// Single-point general capacity, obtained by sweeping up to the target.
inline CapacityPoint capacity_general(Snr rho, double step_db = 0.1) {
    require(step_db > 0.0, "step must be positive");
    const double target = rho.db();
    if (target <= 0.0) {
        auto pt = capacity_reactive(rho);
        return pt;
    }
    const auto n = static_cast<long>(std::ceil(target / step_db - 1e-9));
    SweepConfig cfg;
    cfg.step_db = target / static_cast<double>(n);
    cfg.snr_db_start = 0.0;
    cfg.snr_db_end = target;
    auto sweep = capacity_general_sweep(cfg);
    return sweep.back();
}

// ---------------------------------------------------------------------------
// Purely resistive load: symmetric discrete real inputs.

struct PairState {
    std::vector<double> sq_points;  // t_j^2, first entry pinned to 1
    std::vector<double> probs;      // pair masses
};

namespace detail {

inline std::pair<PairState, opt::Result> optimize_pairs(const SymmetricRealEvaluator& ev, const PairState& init) {
    const std::size_t n = init.sq_points.size();
    const std::size_t nf = n - 1;
    std::vector<double> x(2 * nf), lo(2 * nf), hi(2 * nf);
    for (std::size_t i = 0; i < nf; ++i) {
        x[i] = std::clamp(init.sq_points[i + 1], 0.0, 1.0);
        lo[i] = 0.0;
        hi[i] = 1.0;
        x[nf + i] = std::log(init.probs[i + 1] / init.probs[0]);
        lo[nf + i] = -60.0;
        hi[nf + i] = 60.0;
    }
    auto unpack = [&](std::span<const double> v, std::vector<double>& t, std::vector<double>& p) {
        t.assign(n, 1.0);
        for (std::size_t i = 0; i < nf; ++i) t[i + 1] = v[i];
        p = opt::softmax_tail(v.subspan(nf));
    };
    auto fg = [&](std::span<const double> v, std::span<double> g) {
        std::vector<double> t, p;
        unpack(v, t, p);
        const auto r = ev.evaluate(t, p, true);
        for (std::size_t i = 0; i < nf; ++i) g[i] = -r.d_sq_point[i + 1];
        std::vector<double> dl(nf);
        opt::softmax_tail_gradient(p, r.d_prob, dl);
        for (std::size_t i = 0; i < nf; ++i) g[nf + i] = -dl[i];
        return -r.mi;
    };
    auto res = opt::minimize(fg, x, lo, hi, capacity_options());
    PairState s;
    unpack(res.x, s.sq_points, s.probs);
    return {std::move(s), std::move(res)};
}

inline RealConstellation to_real_constellation(const PairState& s) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t j = 0; j < s.sq_points.size(); ++j) {
        const double t = std::sqrt(std::clamp(s.sq_points[j], 0.0, 1.0));
        if (s.probs[j] <= 0.0) continue;
        if (t < 1e-9) {
            pts.emplace_back(0.0, s.probs[j]);
        } else {
            pts.emplace_back(-t, 0.5 * s.probs[j]);
            pts.emplace_back(t, 0.5 * s.probs[j]);
        }
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> x, p;
    for (const auto& [pos, prob] : pts) {
        if (!x.empty() && std::abs(pos - x.back()) < 1e-9) {
            p.back() += prob;
        } else {
            x.push_back(pos);
            p.push_back(prob);
        }
    }
    return RealConstellation(std::move(x), detail::normalized(std::move(p)));
}

// Drops pairs without mass and merges coincident pairs.
inline PairState compact(const PairState& s) {
    PairState out;
    for (std::size_t j = 0; j < s.sq_points.size(); ++j) {
        if (j > 0 && s.probs[j] < 1e-14) continue;
        bool merged = false;
        for (std::size_t i = 0; i < out.sq_points.size(); ++i)
            if (std::abs(out.sq_points[i] - s.sq_points[j]) < 1e-12) {
                out.probs[i] += s.probs[j];
                merged = true;
                break;
            }
        if (!merged) {
            out.sq_points.push_back(s.sq_points[j]);
            out.probs.push_back(s.probs[j]);
        }
    }
    out.probs = detail::normalized(out.probs);
    return out;
}

} // namespace detail

// Resistive capacity along a grid. Starts from the binary input {+-1} and
// grows the alphabet by symmetric pairs using the same keep rule as the
// circle sweep. The grid may start anywhere; points below the first grid
// value are warmed up from -5 dB.
inline std::vector<CapacityPoint> capacity_resistive_sweep_points(const std::vector<double>& grid,
                                                                  const SweepConfig& cfg = {}) {
    require(!grid.empty(), "sweep grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i) require(grid[i] > grid[i - 1], "sweep grid must be increasing");
    std::vector<double> path;
    const double warm = std::min(grid.front(), -5.0);
    for (double db = warm; db < grid.front() - 1e-9; db += 0.5) path.push_back(db);
    const std::size_t skip = path.size();
    path.insert(path.end(), grid.begin(), grid.end());

    std::vector<CapacityPoint> out;
    PairState state{{1.0}, {1.0}};
    for (std::size_t i = 0; i < path.size(); ++i) {
        const Snr rho = Snr::from_db(path[i]);
        const SymmetricRealEvaluator ev(rho);
        auto [best, best_res] = detail::optimize_pairs(ev, state);
        for (int extra = 0; extra < 64; ++extra) {
            PairState trial = best;
            trial.sq_points.push_back(0.0);
            trial.probs.push_back(cfg.trial_prob_fraction * trial.probs.front());
            trial.probs = detail::normalized(trial.probs);
            auto [grown, grown_res] = detail::optimize_pairs(ev, trial);
            if (!(-grown_res.f >= -best_res.f * (1.0 + cfg.ppm_keep_threshold))) break;
            best = std::move(grown);
            best_res = std::move(grown_res);
        }
        state = detail::compact(best);
        if (i < skip) continue;
        CapacityPoint pt{rho, -best_res.f, detail::to_real_constellation(state), best_res.converged, {}};
        if (!best_res.converged) pt.message = "optimizer did not converge: " + best_res.message;
        out.push_back(std::move(pt));
    }
    return out;
}

inline std::vector<CapacityPoint> capacity_resistive_sweep(const SweepConfig& cfg) {
    SweepConfig c = cfg;
    c.allow_high_start = true;
    return capacity_resistive_sweep_points(c.grid(), c);
}

inline CapacityPoint capacity_resistive(Snr rho) {
    SweepConfig c;
    c.snr_db_start = rho.db();
    c.snr_db_end = rho.db();
    c.step_db = 1.0;
    return capacity_resistive_sweep(c).back();
}

// ---------------------------------------------------------------------------
// Capacity lookup table on a dB grid, linear interpolation in dB.

class CapacityTable {
public:
    CapacityTable() = default;
    CapacityTable(std::vector<double> snr_db, std::vector<double> rate) : snr_db_(std::move(snr_db)), rate_(std::move(rate)) {
        require(!snr_db_.empty() && snr_db_.size() == rate_.size(), "capacity table needs matching nonempty columns");
        for (std::size_t i = 1; i < snr_db_.size(); ++i)
            require(snr_db_[i] > snr_db_[i - 1], "capacity table SNRs must be strictly increasing");
    }

    static CapacityTable from_points(const std::vector<CapacityPoint>& pts) {
        std::vector<double> s, r;
        for (const auto& p : pts) {
            s.push_back(p.snr.db());
            r.push_back(p.rate);
        }
        return CapacityTable(std::move(s), std::move(r));
    }

    // Builds the general-load table by running the sweep.
    static CapacityTable general(double db_lo = -30.0, double db_hi = 30.0, double step_db = 0.1) {
        std::vector<double> s, r;
        // Below the single-circle threshold the reactive capacity is exact.
        const double split = std::min(db_hi, 0.0);
        const auto n_low = static_cast<long>(std::floor((split - db_lo) / step_db + 1e-9));
        for (long i = 0; i < n_low; ++i) {
            const double db = db_lo + static_cast<double>(i) * step_db;
            s.push_back(db);
            r.push_back(capacity_reactive(Snr::from_db(db)).rate);
        }
        SweepConfig cfg;
        cfg.snr_db_start = db_lo + static_cast<double>(n_low) * step_db;
        cfg.snr_db_end = db_hi;
        cfg.step_db = step_db;
        for (const auto& p : capacity_general_sweep(cfg)) {
            s.push_back(p.snr.db());
            r.push_back(p.rate);
        }
        return CapacityTable(std::move(s), std::move(r));
    }

    double min_db() const { return snr_db_.front(); }
    double max_db() const { return snr_db_.back(); }
    const std::vector<double>& snr_db() const { return snr_db_; }
    const std::vector<double>& rate() const { return rate_; }

    // Below the table: rho log2 e. Above: the log2(1 + rho/e) asymptote,
    // shifted to meet the last table entry.
    double operator()(double rho_linear) const {
        require(!snr_db_.empty(), "capacity table is empty");
        require(rho_linear >= 0.0 && std::isfinite(rho_linear), "SNR must be nonnegative and finite");
        if (rho_linear == 0.0) return 0.0;
        const double db = 10.0 * std::log10(rho_linear);
        if (db < snr_db_.front()) return rho_linear * kLog2e;
        if (db > snr_db_.back()) {
            const double r_max = std::pow(10.0, snr_db_.back() / 10.0);
            return rate_.back() + std::log2(1.0 + rho_linear / std::numbers::e) -
                   std::log2(1.0 + r_max / std::numbers::e);
        }
        const auto it = std::upper_bound(snr_db_.begin(), snr_db_.end(), db);
        if (it == snr_db_.end()) return rate_.back();
        const std::size_t j = static_cast<std::size_t>(it - snr_db_.begin());
        const double t = (db - snr_db_[j - 1]) / (snr_db_[j] - snr_db_[j - 1]);
        return rate_[j - 1] + t * (rate_[j] - rate_[j - 1]);
    }

    void save_csv(const std::string& path) const {
        std::ofstream f(path);
        if (!f) throw Error("cannot write capacity table: " + path);
        f.precision(17);
        f << "snr_db,rate_bpcu\n";
        for (std::size_t i = 0; i < snr_db_.size(); ++i) f << snr_db_[i] << ',' << rate_[i] << '\n';
    }

    static CapacityTable load_csv(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw InvalidArgument("cannot read capacity table: " + path);
        std::vector<double> s, r;
        std::string line;
        while (std::getline(f, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("snr_db", 0) == 0) continue;
            std::istringstream ls(line);
            std::string a, b;
            if (!std::getline(ls, a, ',') || !std::getline(ls, b, ','))
                throw InvalidArgument("malformed capacity table line: " + line);
            try {
                s.push_back(std::stod(a));
                r.push_back(std::stod(b));
            } catch (const std::exception&) {
                throw InvalidArgument("malformed capacity table line: " + line);
            }
        }
        return CapacityTable(std::move(s), std::move(r));
    }

private:
    std::vector<double> snr_db_;
    std::vector<double> rate_;
};

} // namespace bscap
