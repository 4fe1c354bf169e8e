#pragma once

// Slow flows of the three oscillators. With x ~ A cos(t) + B sin(t) and slow
// time eta = eps t, each system reduces to
//
//   Z' = (mu + i rho) Z + (i k / 2) e^{iT} Z_d + cubic(Z),   Z = A + i B,
//
// where Z_d = Z(eta - eps T). Duffing has mu = -alpha/2, rho = 0; van der Pol
// has mu = 1/2, rho = 0; Erneux-Grasman adds the phase drift rho = -k/2 coming
// from the -k x term. Passing delayed == now gives the undelayed (approach I)
// slow flow.

#include <cmath>

#include "hopfdelay/errors.hpp"
#include "hopfdelay/systems.hpp"

namespace hopfdelay {

inline constexpr double kPolarTolerance = 1e-8;

struct PlaneState {
    double A = 0.0;
    double B = 0.0;
    double eta = 0.0;

    Vec2<double> vector() const { return {A, B}; }
};

struct PolarState {
    double R = 0.0;
    double theta = 0.0;
    double eta = 0.0;
};

/// Growth rate mu and rotation rate rho of the undelayed linear part.
template <typename Scalar>
struct LinearSlowTerms {
    Scalar growth;
    Scalar rotation;
};

template <typename Scalar>
LinearSlowTerms<Scalar> linear_slow_terms(const SystemSpec& spec) {
    switch (spec.kind) {
        case SystemKind::Duffing: return {-static_cast<Scalar>(spec.alpha) / Scalar(2), Scalar(0)};
        case SystemKind::VanDerPol: return {Scalar(0.5), Scalar(0)};
        case SystemKind::ErneuxGrasman: return {Scalar(0.5), -static_cast<Scalar>(spec.k) / Scalar(2)};
    }
    return {Scalar(0), Scalar(0)};
}

template <typename Scalar>
Vec2<Scalar> linearized_cartesian_rhs(const SystemSpec& spec, Scalar delay, const Vec2<Scalar>& now,
                                      const Vec2<Scalar>& delayed) {
    using std::cos;
    using std::sin;
    const auto lin = linear_slow_terms<Scalar>(spec);
    const Scalar half_k = static_cast<Scalar>(spec.k) / Scalar(2);
    const Scalar s = sin(delay);
    const Scalar c = cos(delay);

    Vec2<Scalar> out;
    out(0) = lin.growth * now(0) - lin.rotation * now(1) - half_k * (delayed(0) * s + delayed(1) * c);
    out(1) = lin.growth * now(1) + lin.rotation * now(0) - half_k * (delayed(1) * s - delayed(0) * c);
    return out;
}

template <typename Scalar>
Vec2<Scalar> cartesian_rhs(const SystemSpec& spec, Scalar delay, const Vec2<Scalar>& now,
                           const Vec2<Scalar>& delayed) {
    Vec2<Scalar> out = linearized_cartesian_rhs(spec, delay, now, delayed);
    const Scalar r2 = now.squaredNorm();
    switch (spec.kind) {
        case SystemKind::Duffing: {
            const Scalar drift = Scalar(3) * static_cast<Scalar>(spec.gamma) * r2 / Scalar(8);
            out(0) += drift * now(1);
            out(1) -= drift * now(0);
            break;
        }
        case SystemKind::VanDerPol:
        case SystemKind::ErneuxGrasman:
            out -= (r2 / Scalar(8)) * now;
            break;
    }
    return out;
}

inline Vec2<double> cartesian_rhs(const SystemSpec& spec, double delay, const PlaneState& now,
                                  const PlaneState& delayed) {
    return cartesian_rhs<double>(spec, delay, now.vector(), delayed.vector());
}

inline Vec2<double> linearized_cartesian_rhs(const SystemSpec& spec, double delay, const PlaneState& now,
                                             const PlaneState& delayed) {
    return linearized_cartesian_rhs<double>(spec, delay, now.vector(), delayed.vector());
}

/// (dR/deta, dtheta/deta) with A = R cos(theta), B = R sin(theta).
/// Throws PolarSingularityError for R <= kPolarTolerance.
template <typename Scalar>
Vec2<Scalar> polar_rhs(const SystemSpec& spec, Scalar delay, Scalar radius, Scalar theta, Scalar radius_delayed,
                       Scalar theta_delayed) {
    using std::cos;
    using std::sin;
    if (!(radius > static_cast<Scalar>(kPolarTolerance))) {
        throw PolarSingularityError("polar slow flow is singular at R = 0");
    }
    const Scalar half_k = static_cast<Scalar>(spec.k) / Scalar(2);
    const Scalar phase = theta_delayed - theta + delay;

    Scalar d_radius = -half_k * radius_delayed * sin(phase);
    Scalar d_theta = half_k * (radius_delayed / radius) * cos(phase);
    switch (spec.kind) {
        case SystemKind::Duffing:
            d_radius -= static_cast<Scalar>(spec.alpha) * radius / Scalar(2);
            d_theta -= Scalar(3) * static_cast<Scalar>(spec.gamma) * radius * radius / Scalar(8);
            break;
        case SystemKind::VanDerPol:
            d_radius += radius / Scalar(2) - radius * radius * radius / Scalar(8);
            break;
        case SystemKind::ErneuxGrasman:
            d_radius += radius / Scalar(2) - radius * radius * radius / Scalar(8);
            d_theta -= half_k;
            break;
    }
    return {d_radius, d_theta};
}

inline Vec2<double> polar_rhs(const SystemSpec& spec, double delay, const PolarState& now,
                              const PolarState& delayed) {
    return polar_rhs<double>(spec, delay, now.R, now.theta, delayed.R, delayed.theta);
}

}  // namespace hopfdelay
