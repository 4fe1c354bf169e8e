#pragma once

// Characteristic systems in (omega, T) and their numerical solution.
//
// The slow-flow system is the determinant of the delayed linearized slow flow
// at lambda = i*omega; the exact system is the characteristic function of the
// original DDE. Both are solved by damped Newton on the real/imaginary pair
// and traced in k or eps by natural-parameter continuation.

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hopfdelay/hopf_analytic.hpp"
#include "hopfdelay/slowflow.hpp"
#include "hopfdelay/systems.hpp"

namespace hopfdelay {

/// Factor between the expanded residual and the complex determinant: the
/// Duffing expressions are written with a common factor 16 cleared.
inline double slowflow_residual_scale(SystemKind kind) {
    return kind == SystemKind::Duffing ? 16.0 : 1.0;
}

/// Expanded real and imaginary parts of the slow-flow characteristic
/// determinant at lambda = i*omega.
template <typename Scalar>
ResidualPair<Scalar> slowflow_char_residual(const SystemSpec& spec, Scalar omega, Scalar delay) {
    using std::cos;
    using std::sin;
    const Scalar eps = static_cast<Scalar>(spec.epsilon);
    const Scalar k = static_cast<Scalar>(spec.k);
    const Scalar phase = eps * omega * delay;
    const Scalar c = cos(phase);
    const Scalar s = sin(phase);
    const Scalar c2 = cos(Scalar(2) * phase);
    const Scalar s2 = sin(Scalar(2) * phase);
    const Scalar sin_t = sin(delay);

    if (spec.kind == SystemKind::Duffing) {
        const Scalar a = static_cast<Scalar>(spec.alpha);
        return {Scalar(4) * k * k * c2 + Scalar(16) * k * omega * sin_t * s + Scalar(8) * a * k * sin_t * c -
                    Scalar(16) * omega * omega + Scalar(4) * a * a,
                -Scalar(4) * k * k * s2 - Scalar(8) * a * k * sin_t * s + Scalar(16) * k * omega * sin_t * c +
                    Scalar(16) * a * omega};
    }

    ResidualPair<Scalar> r{-k / Scalar(2) * c * sin_t + k * omega * s * sin_t + k * k / Scalar(4) * c2 +
                               Scalar(0.25) - omega * omega,
                           k * omega * c * sin_t + k / Scalar(2) * s * sin_t - k * k / Scalar(4) * s2 - omega};
    if (spec.kind == SystemKind::ErneuxGrasman) {
        const Scalar cos_t = cos(delay);
        r.re += k * k / Scalar(4) - k * k / Scalar(2) * c * cos_t;
        r.im += k * k / Scalar(2) * s * cos_t;
    }
    return r;
}

inline ResidualPair<double> slowflow_char_residual(const SystemSpec& spec, double omega, double delay) {
    return slowflow_char_residual<double>(spec, omega, delay);
}

/// Slow-flow determinant D = p^2 + q^2 (times the residual scale) with its
/// partial derivatives, where p = mu - lambda - (k/2) E sin T and
/// q = rho + (k/2) E cos T, E = exp(-lambda eps T).
template <typename Scalar>
CharacteristicValue<Scalar> slowflow_characteristic(const SystemSpec& spec, Scalar omega, Scalar delay) {
    using Complex = std::complex<Scalar>;
    using std::cos;
    using std::sin;
    const Scalar eps = static_cast<Scalar>(spec.epsilon);
    const Scalar half_k = static_cast<Scalar>(spec.k) / Scalar(2);
    const auto lin = linear_slow_terms<Scalar>(spec);
    const Scalar scale = static_cast<Scalar>(slowflow_residual_scale(spec.kind));
    const Scalar sin_t = sin(delay);
    const Scalar cos_t = cos(delay);

    const Complex lambda(Scalar(0), omega);
    const Complex e = std::exp(-lambda * eps * delay);
    const Complex p = lin.growth - lambda - half_k * e * sin_t;
    const Complex q = lin.rotation + half_k * e * cos_t;

    const Complex dp_dlambda = Scalar(-1) + half_k * eps * delay * e * sin_t;
    const Complex dq_dlambda = -half_k * eps * delay * e * cos_t;
    const Complex dp_ddelay = half_k * e * (lambda * eps * sin_t - cos_t);
    const Complex dq_ddelay = -half_k * e * (lambda * eps * cos_t + sin_t);

    CharacteristicValue<Scalar> out;
    out.value = scale * (p * p + q * q);
    out.d_omega = scale * Complex(Scalar(0), Scalar(1)) * Scalar(2) * (p * dp_dlambda + q * dq_dlambda);
    out.d_delay = scale * Scalar(2) * (p * dp_ddelay + q * dq_ddelay);
    return out;
}

enum class CharTarget { SlowFlow, ExactChar };

/// Residual and Jacobian of a 2x2 system in z = (omega, T).
struct Linearization {
    Vec2<double> residual;
    Mat2<double> jacobian;
};

using ResidualFunction = std::function<Linearization(const Vec2<double>&)>;

/// Residual of the chosen characteristic system with its analytic Jacobian.
ResidualFunction make_residual(const SystemSpec& spec, CharTarget target);

/// Residual norm only, without the Jacobian.
double characteristic_residual_norm(const SystemSpec& spec, CharTarget target, double omega, double delay);

struct NewtonOptions {
    int max_iter = 50;
    double tol = 1e-10;
    int max_halvings = 8;
    double singular_det = 1e-14;
};

struct NewtonResult {
    double omega = 0.0;
    double delay = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
};

/// Damped Newton. Throws DivergenceError (carrying the last iterate) when
/// max_iter is exhausted or the iterate becomes non-finite, and
/// SingularStepError when |det J| < singular_det. A converged iterate gets
/// one extra undamped step, kept only if it does not raise the residual.
NewtonResult newton_solve(const ResidualFunction& fn, const Vec2<double>& initial, const NewtonOptions& opts = {});

/// Starting (omega, T) for a branch, built from the approach I closed forms.
/// For the exact target the frequency is shifted to 1 + sign*eps*omega0 and
/// the delay to T0 / (1 + sign*eps*omega0).
Vec2<double> closed_form_seed(const SystemSpec& spec, Branch branch, CharTarget target, int n = 0);

enum class SweepParameter { K, Epsilon };

struct Sweep {
    SweepParameter parameter = SweepParameter::K;
    double from = 0.0;
    double to = 0.0;
    int steps = 2;  // grid points, both ends included
};

struct CurvePoint {
    double sweep_value = 0.0;
    HopfPoint point;
    double residual_norm = 0.0;
    int iterations = 0;
};

struct ContinuationOptions {
    NewtonOptions newton;
    int max_step_halvings = 14;
    // Accepted steps satisfy |dT| <= continuity_factor * |dT_predicted| + slack * (1 + |T|).
    double continuity_factor = 5.0;
    double continuity_slack = 0.02;
    // Points whose frequency falls below this are treated as the end of the branch.
    double min_omega = 1e-6;
    int branch_index = 0;
};

struct SweepResult {
    std::vector<CurvePoint> points;
    bool truncated = false;
    std::string warning;
};

SystemSpec with_parameter(SystemSpec spec, SweepParameter parameter, double value);

std::vector<double> sweep_grid(const Sweep& sweep);

/// Traces one branch across the sweep grid. The first grid point is seeded
/// from closed_form_seed; its failure throws. Later failures truncate the
/// curve and set the warning instead of leaving gaps.
SweepResult continuation_sweep(const SystemSpec& base, const Sweep& sweep, Branch branch, CharTarget target,
                               const ContinuationOptions& opts = {});

/// Same, over an explicit grid of parameter values.
SweepResult continuation_sweep(const SystemSpec& base, SweepParameter parameter, std::span<const double> grid,
                               Branch branch, CharTarget target, const ContinuationOptions& opts = {});

}  // namespace hopfdelay
