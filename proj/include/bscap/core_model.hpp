#pragma once

// Circuit-level quantities of a load-modulating tag and the Moebius maps
// between normalized load impedance, reflection coefficient and tag current.

#include <cmath>
#include <complex>
#include <limits>

#include "bscap/error.hpp"

namespace bscap {

using cplx = std::complex<double>;

// Slack for passivity and unit-disk membership checks.
inline constexpr double kTolerance = 1e-12;

inline constexpr double kLog2e = 1.4426950408889634074;  // log2(e)

class Snr {
public:
    static Snr from_linear(double linear) { return Snr(linear); }
    static Snr from_db(double db) { return Snr(std::pow(10.0, db / 10.0)); }

    double linear() const { return linear_; }
    double db() const { return 10.0 * std::log10(linear_); }

private:
    explicit Snr(double linear) : linear_(linear) {
        require(std::isfinite(linear) && linear > 0.0, "SNR must be positive and finite");
    }
    double linear_;
};

class ReflectionCoefficient {
public:
    explicit ReflectionCoefficient(cplx value) : value_(value) {
        require(std::isfinite(value.real()) && std::isfinite(value.imag()),
                "reflection coefficient must be finite");
        require(std::abs(value) <= 1.0 + kTolerance, "reflection coefficient outside the unit disk");
    }
    cplx value() const { return value_; }

private:
    cplx value_;
};

class NormalizedImpedance {
public:
    explicit NormalizedImpedance(cplx value) : value_(value) {
        require(std::isfinite(value.real()) && std::isfinite(value.imag()),
                "normalized impedance must be finite");
        require(value.real() >= -kTolerance, "normalized impedance is not passive (Re(z) < 0)");
    }
    cplx value() const { return value_; }
    double r() const { return value_.real(); }
    double x() const { return value_.imag(); }

private:
    cplx value_;
};

struct MatchedCurrent {
    cplx i_pm;
};

// Antenna-side circuit description. Impedances in ohm, voltages in volt.
struct TagCircuitParams {
    double r_tx = 1.0;
    double x_tx = 0.0;
    cplx v_ind_tx{1.0, 0.0};
    cplx z_mutual{1.0, 0.0};
    double noise_var = 1.0;

    void validate() const {
        require(std::isfinite(r_tx) && r_tx > 0.0, "antenna resistance must be positive");
        require(std::isfinite(noise_var) && noise_var > 0.0, "noise variance must be positive");
    }
};

inline ReflectionCoefficient gamma_from_z(NormalizedImpedance z) {
    const cplx v = z.value();
    cplx g = (v - 1.0) / (v + 1.0);
    // Re(z) within the passivity slack may land a hair outside the disk.
    if (std::abs(g) > 1.0) g /= std::abs(g);
    return ReflectionCoefficient(g);
}

inline NormalizedImpedance z_from_gamma(ReflectionCoefficient g) {
    const cplx v = g.value();
    if (std::abs(1.0 - v) <= kTolerance) throw OpenCircuit();
    cplx z = (1.0 + v) / (1.0 - v);
    if (z.real() < 0.0) z.real(0.0);
    return NormalizedImpedance(z);
}

inline MatchedCurrent matched_current(const TagCircuitParams& p) {
    p.validate();
    return {p.v_ind_tx / (2.0 * p.r_tx)};
}

inline cplx tag_current(ReflectionCoefficient g, MatchedCurrent i) {
    require(std::isfinite(i.i_pm.real()) && std::isfinite(i.i_pm.imag()), "matched current must be finite");
    return (1.0 - g.value()) * i.i_pm;
}

inline Snr link_snr(const TagCircuitParams& p) {
    p.validate();
    const double num = std::norm(p.z_mutual) * std::norm(p.v_ind_tx);
    return Snr::from_linear(num / (4.0 * p.r_tx * p.r_tx * p.noise_var));
}

} // namespace bscap
