#pragma once

// Mutual information between the reflection coefficient and the noisy
// receive signal y = Gamma + w, w ~ CN(0, 1/rho), for every input family the
// library handles. All rates are in bit per channel use.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "bscap/core_model.hpp"
#include "bscap/input_laws.hpp"
#include "bscap/quadrature.hpp"
#include "bscap/special_functions.hpp"

namespace bscap {

inline constexpr double kLn2 = std::numbers::ln2;

// Upper end of the receive-radius integration range.
inline double radius_upper_limit(Snr rho) { return 1.0 + 5.0 / std::sqrt(rho.linear()); }

// Received-radius density for concentric-circle inputs: a Rician mixture.
inline double radius_pdf_dauip(double b, const DauipDistribution& d, Snr rho) {
    require(b >= 0.0 && std::isfinite(b), "radius must be nonnegative");
    const double r = rho.linear();
    double sum = 0.0;
    for (std::size_t k = 0; k < d.k(); ++k) {
        const double a = d.radii()[k];
        sum += d.probs()[k] * std::exp(-r * (b - a) * (b - a)) * bessel_i0e(2.0 * r * a * b);
    }
    return 2.0 * r * b * sum;
}

// Received-radius density for an input uniform over the unit disk.
inline double radius_pdf_uniform_disk(double b, Snr rho) {
    require(b >= 0.0 && std::isfinite(b), "radius must be nonnegative");
    const double s = std::sqrt(2.0 * rho.linear());
    return 2.0 * b * marcum_p1(b * s, s);
}

// I = log2(2 rho / e) - int f_b log2(f_b / b) db for inputs with uniform
// independent phase. `radius_pdf` is the density of the received radius.
inline double mi_uip(const std::function<double(double)>& radius_pdf, Snr rho, double abs_tol = 1e-11) {
    auto integrand = [&](double b) {
        const double f = radius_pdf(b);
        if (!(f > 0.0)) {
            if (f < 0.0 || std::isnan(f)) throw InvalidArgument("radius density returned a negative or NaN value");
            return 0.0;
        }
        return f * std::log2(f / b);
    };
    const double upper = radius_upper_limit(rho);
    const double inner = quad::integrate_adaptive(integrand, 0.0, 1.0, abs_tol, 1e-13).value;
    const double outer = quad::integrate_adaptive(integrand, 1.0, upper, abs_tol, 1e-13).value;
    return std::log2(2.0 * rho.linear() / std::numbers::e) - inner - outer;
}

// Fixed-grid evaluator of the concentric-circle mutual information and its
// gradient. Radii enter through their squares u_k = a_k^2: the received
// density is even in a_k, so u is the coordinate in which a circle at the
// origin still has a nonzero slope.
class DauipEvaluator {
public:
    explicit DauipEvaluator(Snr rho)
        : rho_(rho.linear()),
          grid_(quad::composite_grid(0.0, radius_upper_limit(rho), std::min(0.25, 1.0 / std::sqrt(2.0 * rho_)))) {}

    struct Result {
        double mi = 0.0;
        std::vector<double> d_sq_radius;  // dI/d(a_k^2)
        std::vector<double> d_prob;       // dI/dp_k
    };

    // Probabilities need not be normalized for the gradient to be meaningful,
    // but the value is only a mutual information when they sum to one.
    Result evaluate(std::span<const double> sq_radii, std::span<const double> probs, bool with_gradient = true) const {
        const std::size_t k_count = sq_radii.size();
        require(k_count > 0 && probs.size() == k_count, "circle parameter sizes disagree");
        Result res;
        if (with_gradient) {
            res.d_sq_radius.assign(k_count, 0.0);
            res.d_prob.assign(k_count, 0.0);
        }
        std::vector<double> a(k_count), log_p(k_count), comp(k_count), log_comp(k_count), dcomp(k_count);
        for (std::size_t k = 0; k < k_count; ++k) {
            a[k] = std::sqrt(std::max(0.0, sq_radii[k]));
            log_p[k] = probs[k] > 0.0 ? std::log(probs[k]) : -std::numeric_limits<double>::infinity();
        }
        const double log_2rho = std::log(2.0 * rho_);
        double entropy_term = 0.0;
        for (std::size_t i = 0; i < grid_.x.size(); ++i) {
            const double b = grid_.x[i];
            double lmax = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < k_count; ++k) {
                const double x = 2.0 * rho_ * a[k] * b;
                const double g0 = bessel_i0e(x);
                const double gauss = -rho_ * (b - a[k]) * (b - a[k]);
                log_comp[k] = gauss + std::log(g0);
                comp[k] = 2.0 * rho_ * b * std::exp(log_comp[k]);
                if (with_gradient)
                    dcomp[k] = 2.0 * rho_ * b * std::exp(gauss) * rho_ *
                               (2.0 * rho_ * b * b * bessel_i1e_over_x(x) - g0);
                lmax = std::max(lmax, log_p[k] + log_comp[k]);
            }
            double s = 0.0;
            for (std::size_t k = 0; k < k_count; ++k) s += std::exp(log_p[k] + log_comp[k] - lmax);
            // log(f_b / b) stays finite even when f_b underflows.
            const double log_fb_over_b = log_2rho + lmax + std::log(s);
            const double f = b * std::exp(log_fb_over_b);
            const double l2 = log_fb_over_b / kLn2;
            entropy_term += grid_.w[i] * f * l2;
            if (with_gradient) {
                const double factor = grid_.w[i] * (l2 + 1.0 / kLn2);
                for (std::size_t k = 0; k < k_count; ++k) {
                    res.d_prob[k] -= factor * comp[k];
                    res.d_sq_radius[k] -= factor * probs[k] * dcomp[k];
                }
            }
        }
        res.mi = std::log2(2.0 * rho_ / std::numbers::e) - entropy_term;
        return res;
    }

    double mi(const DauipDistribution& d) const {
        std::vector<double> u(d.k());
        for (std::size_t k = 0; k < d.k(); ++k) u[k] = d.radii()[k] * d.radii()[k];
        return evaluate(u, d.probs(), false).mi;
    }

    std::size_t grid_size() const { return grid_.x.size(); }

private:
    double rho_;
    quad::Grid grid_;
};

inline double mi_dauip(const DauipDistribution& d, Snr rho) { return DauipEvaluator(rho).mi(d); }

namespace detail {

inline double log_sum_exp(std::span<const double> v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

} // namespace detail

// Real-valued channel y = Gamma + w, w ~ N(0, 1/(2 rho)), finite input.
inline double mi_real_discrete(const RealConstellation& c, Snr rho) {
    const double r = rho.linear();
    const double margin = 5.0 / std::sqrt(r);
    const double width = std::min(0.25, 1.0 / std::sqrt(2.0 * r));
    const auto grid = quad::composite_grid(c.points().front() - margin, c.points().back() + margin, width);
    std::vector<double> terms(c.size());
    const double log_norm = 0.5 * std::log(r / std::numbers::pi);
    double h = 0.0;
    for (std::size_t i = 0; i < grid.x.size(); ++i) {
        const double y = grid.x[i];
        for (std::size_t m = 0; m < c.size(); ++m) {
            const double q = c.probs()[m];
            const double d = y - c.points()[m];
            terms[m] = q > 0.0 ? std::log(q) - r * d * d : -std::numeric_limits<double>::infinity();
        }
        const double log_f = log_norm + detail::log_sum_exp(terms);
        if (!std::isfinite(log_f)) continue;
        h -= grid.w[i] * std::exp(log_f) * log_f / kLn2;
    }
    const double mi = 0.5 * std::log2(r / (std::numbers::pi * std::numbers::e)) + h;
    return std::max(0.0, mi);
}

// Symmetric real constellation {+-t_j} with pair masses P_j (each sign gets
// P_j / 2; t_j = 0 collapses the pair onto the origin). The value and
// gradient are taken with respect to v_j = t_j^2 and P_j.
class SymmetricRealEvaluator {
public:
    explicit SymmetricRealEvaluator(Snr rho)
        : rho_(rho.linear()),
          grid_(quad::composite_grid(0.0, 1.0 + 5.0 / std::sqrt(rho_), std::min(0.25, 1.0 / std::sqrt(2.0 * rho_)))) {}

    struct Result {
        double mi = 0.0;
        std::vector<double> d_sq_point;
        std::vector<double> d_prob;
    };

    Result evaluate(std::span<const double> sq_points, std::span<const double> pair_probs,
                    bool with_gradient = true) const {
        const std::size_t n = sq_points.size();
        require(n > 0 && pair_probs.size() == n, "pair parameter sizes disagree");
        Result res;
        if (with_gradient) {
            res.d_sq_point.assign(n, 0.0);
            res.d_prob.assign(n, 0.0);
        }
        const double norm = std::sqrt(rho_ / std::numbers::pi);
        std::vector<double> t(n), comp(n), dcomp(n), log_terms(n);
        for (std::size_t j = 0; j < n; ++j) t[j] = std::sqrt(std::max(0.0, sq_points[j]));
        double h_half = 0.0;
        for (std::size_t i = 0; i < grid_.x.size(); ++i) {
            const double y = grid_.x[i];
            for (std::size_t j = 0; j < n; ++j) {
                const double em = -rho_ * (y - t[j]) * (y - t[j]);
                const double ep = -rho_ * (y + t[j]) * (y + t[j]);
                const double e1 = std::exp(em), e2 = std::exp(ep);
                comp[j] = 0.5 * norm * (e1 + e2);
                // log of the pair density, robust against underflow of both terms
                log_terms[j] = (pair_probs[j] > 0.0 ? std::log(pair_probs[j]) : -std::numeric_limits<double>::infinity()) +
                               std::log(0.5 * norm) + em + std::log1p(std::exp(ep - em));
                if (with_gradient) {
                    const double z = 2.0 * rho_ * y * t[j];
                    double diff_over_t;  // (e1 - e2) / t
                    if (z < 1e-3) {
                        const double base = std::exp(-rho_ * (y * y + t[j] * t[j]));
                        diff_over_t = base * 4.0 * rho_ * y * (1.0 + z * z / 6.0);
                    } else {
                        diff_over_t = (e1 - e2) / t[j];
                    }
                    dcomp[j] = 0.5 * norm * rho_ * (y * diff_over_t - (e1 + e2));
                }
            }
            const double log_f = detail::log_sum_exp(log_terms);
            if (!std::isfinite(log_f)) continue;
            const double f = std::exp(log_f);
            const double l2 = log_f / kLn2;
            h_half -= grid_.w[i] * f * l2;
            if (with_gradient) {
                const double factor = 2.0 * grid_.w[i] * (l2 + 1.0 / kLn2);
                for (std::size_t j = 0; j < n; ++j) {
                    res.d_prob[j] -= factor * comp[j];
                    res.d_sq_point[j] -= factor * pair_probs[j] * dcomp[j];
                }
            }
        }
        res.mi = 0.5 * std::log2(rho_ / (std::numbers::pi * std::numbers::e)) + 2.0 * h_half;
        return res;
    }

private:
    double rho_;
    quad::Grid grid_;
};
// Complex finite constellations. The expectation over the noise is done per
// transmitted symbol with a tensor rule for the weight exp(-|u|^2) centred on
// that symbol:
//   I = -sum_m q_m E_w log2 sum_n q_n exp(-rho(|G_m - G_n + w|^2 - |w|^2)).
// The self term n = m contributes exp(0), so the inner sum never underflows.
// In units u = sqrt(rho) w the exponent is -|D|^2 - 2 Re(D conj u), which
// splits into a factor per node coordinate.
class ComplexDiscreteEvaluator {
public:
    // order 0 selects the composite panel rule (error near 1e-12 bpcu);
    // 2..128 selects Gauss-Hermite of that order, cheap but only accurate to
    // about 1e-5 when symbols sit a few noise widths apart.
    explicit ComplexDiscreteEvaluator(Snr rho, int order = kPanelRule)
        : ComplexDiscreteEvaluator(rho, make_rule(order)) {
        order_ = order;
    }

    // Any 1-D rule for the weight exp(-x^2); order() reports its size.
    ComplexDiscreteEvaluator(Snr rho, quad::Rule rule)
        : rho_(rho.linear()), order_(static_cast<int>(rule.nodes.size())), x_(std::move(rule.nodes)),
          w_(std::move(rule.weights)) {
        require(!x_.empty() && x_.size() == w_.size(), "invalid quadrature rule");
        for (double v : x_) max_node_ = std::max(max_node_, std::abs(v));
    }

    struct Result {
        double mi = 0.0;
        std::vector<cplx> d_point;  // dI/dRe + j dI/dIm
        std::vector<double> d_prob;
    };

    Result evaluate(std::span<const cplx> points, std::span<const double> probs, bool with_gradient = true) const {
        const std::size_t m_count = points.size();
        const std::size_t o = x_.size();
        require(m_count > 0 && probs.size() == m_count, "constellation sizes disagree");
        Result res;
        if (with_gradient) {
            res.d_point.assign(m_count, cplx{});
            res.d_prob.assign(m_count, 0.0);
        }
        const double sr = std::sqrt(rho_);
        // Neighbours whose exponent cannot rise above -40 at any node are
        // skipped; past 2 max_node + 4 the only nodes they reach carry
        // weights below exp(-2 max_node^2).
        const double reach = std::min(std::sqrt(2.0) * max_node_ + std::sqrt(2.0 * max_node_ * max_node_ + 40.0),
                                      2.0 * max_node_ + 4.0);
        std::vector<std::size_t> nbr;
        std::vector<cplx> dd;
        std::vector<double> fa, fb, s(o * o), r(o * o), rb(o), rbx(o);
        double total = 0.0;
        for (std::size_t m = 0; m < m_count; ++m) {
            const double qm = probs[m];
            if (!(qm > 0.0) && !with_gradient) continue;
            nbr.clear();
            dd.clear();
            for (std::size_t n = 0; n < m_count; ++n) {
                const cplx d = sr * (points[m] - points[n]);
                if (probs[n] > 0.0 && std::abs(d) <= reach) {
                    nbr.push_back(n);
                    dd.push_back(d);
                }
            }
            const std::size_t nn = nbr.size();
            fa.resize(nn * o);
            fb.resize(nn * o);
            for (std::size_t j = 0; j < nn; ++j) {
                const double half = -0.5 * std::norm(dd[j]);
                for (std::size_t i = 0; i < o; ++i) {
                    fa[j * o + i] = std::exp(half - 2.0 * dd[j].real() * x_[i]);
                    fb[j * o + i] = std::exp(half - 2.0 * dd[j].imag() * x_[i]);
                }
            }
            std::fill(s.begin(), s.end(), 0.0);
            for (std::size_t j = 0; j < nn; ++j) {
                const double q = probs[nbr[j]];
                const double* a = &fa[j * o];
                const double* b = &fb[j * o];
                for (std::size_t i = 0; i < o; ++i) {
                    const double qa = q * a[i];
                    double* row = &s[i * o];
                    for (std::size_t k = 0; k < o; ++k) row[k] += qa * b[k];
                }
            }
            double acc = 0.0;
            bool empty = false;
            for (std::size_t i = 0; i < o; ++i)
                for (std::size_t k = 0; k < o; ++k) {
                    const double v = s[i * o + k];
                    if (!(v > 0.0)) {
                        empty = true;
                        continue;
                    }
                    const double wn = w_[i] * w_[k] / std::numbers::pi;
                    acc += wn * std::log(v);
                    r[i * o + k] = wn / v;
                }
            total -= qm * acc / kLn2;
            if (!with_gradient) continue;
            res.d_prob[m] -= acc / kLn2;
            if (!(qm > 0.0) || empty) continue;
            for (std::size_t j = 0; j < nn; ++j) {
                const double* a = &fa[j * o];
                const double* b = &fb[j * o];
                double t = 0.0, ux = 0.0, uy = 0.0;
                for (std::size_t i = 0; i < o; ++i) {
                    const double* row = &r[i * o];
                    double sb = 0.0, sbx = 0.0;
                    for (std::size_t k = 0; k < o; ++k) {
                        const double v = row[k] * b[k];
                        sb += v;
                        sbx += v * x_[k];
                    }
                    t += a[i] * sb;
                    ux += a[i] * x_[i] * sb;
                    uy += a[i] * sbx;
                }
                const std::size_t n = nbr[j];
                res.d_prob[n] -= qm * t / kLn2;
                // gradient of the exponent w.r.t. the symbol difference: -2 sqrt(rho) (D + u)
                const cplx g = -2.0 * sr * probs[n] * qm / kLn2 * (dd[j] * t + cplx(ux, uy));
                res.d_point[m] -= g;
                res.d_point[n] += g;
            }
        }
        res.mi = total;
        return res;
    }

    double mi(const DiscreteConstellation& c) const {
        return std::max(0.0, evaluate(c.points(), c.probs(), false).mi);
    }

    int order() const { return order_; }
    std::size_t nodes_per_dimension() const { return x_.size(); }

    static constexpr int kPanelRule = 0;

private:
    static quad::Rule make_rule(int order) {
        if (order == kPanelRule) return quad::gaussian_panel_rule(6.0, 0.5, 8);
        require(order >= 2 && order <= 128, "Gauss-Hermite order out of range");
        return quad::compute_gauss_hermite(order);
    }

    double rho_;
    int order_;
    std::vector<double> x_;
    std::vector<double> w_;
    double max_node_ = 0.0;
};

inline double mi_complex_discrete(const DiscreteConstellation& c, Snr rho,
                                  int order = ComplexDiscreteEvaluator::kPanelRule) {
    return ComplexDiscreteEvaluator(rho, order).mi(c);
}

} // namespace bscap
