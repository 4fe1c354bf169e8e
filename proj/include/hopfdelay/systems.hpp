#pragma once

// The three benchmark oscillators with delayed self-feedback
//
//   x'' + x = eps * f(x, x', x(t - T))
//
//   Duffing          f = -alpha x' - gamma x^3 + k x_d
//   van der Pol      f = x' (1 - x^2) + k x_d
//   Erneux-Grasman   f = x' (1 - x^2) + k x_d - k x
//
// together with the exact characteristic function of the origin of each
// (unaveraged) DDE, used as ground truth for the Hopf curves.

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "hopfdelay/errors.hpp"

namespace hopfdelay {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;

enum class SystemKind { Duffing, VanDerPol, ErneuxGrasman };

/// Oscillator plus parameters. alpha and gamma only enter the Duffing kind;
/// they are carried for every kind and ignored elsewhere.
struct SystemSpec {
    SystemKind kind = SystemKind::Duffing;
    double epsilon = 0.1;
    double alpha = 0.0;
    double gamma = 0.0;
    double k = 0.0;
};

/// Throws InvalidArgument unless epsilon > 0 (and alpha >= 0 for Duffing) and
/// every parameter is finite.
inline void validate(const SystemSpec& spec) {
    if (!std::isfinite(spec.epsilon) || !std::isfinite(spec.alpha) || !std::isfinite(spec.gamma) ||
        !std::isfinite(spec.k)) {
        throw InvalidArgument("system parameters must be finite");
    }
    if (spec.epsilon <= 0.0) throw InvalidArgument("epsilon must be positive");
    if (spec.kind == SystemKind::Duffing && spec.alpha < 0.0) {
        throw InvalidArgument("Duffing damping alpha must be non-negative");
    }
}

inline std::string_view to_string(SystemKind kind) {
    switch (kind) {
        case SystemKind::Duffing: return "duffing";
        case SystemKind::VanDerPol: return "vdp";
        case SystemKind::ErneuxGrasman: return "erneux";
    }
    return "unknown";
}

inline std::optional<SystemKind> parse_system_kind(std::string_view name) {
    if (name == "duffing") return SystemKind::Duffing;
    if (name == "vdp" || name == "vanderpol") return SystemKind::VanDerPol;
    if (name == "erneux") return SystemKind::ErneuxGrasman;
    return std::nullopt;
}

struct FullState {
    double x = 0.0;
    double v = 0.0;
    double t = 0.0;
};

/// Real and imaginary parts of a characteristic function at lambda = i*omega.
template <typename Scalar = double>
struct ResidualPair {
    Scalar re{};
    Scalar im{};

    Scalar norm() const {
        using std::hypot;
        return hypot(re, im);
    }
    Vec2<Scalar> vector() const { return Vec2<Scalar>(re, im); }
};

/// Nonlinear forcing f(x, v, x_d) of the chosen oscillator.
template <typename Scalar>
Scalar forcing(const SystemSpec& spec, Scalar x, Scalar v, Scalar x_delayed) {
    const Scalar k = static_cast<Scalar>(spec.k);
    switch (spec.kind) {
        case SystemKind::Duffing:
            return -static_cast<Scalar>(spec.alpha) * v - static_cast<Scalar>(spec.gamma) * x * x * x +
                   k * x_delayed;
        case SystemKind::VanDerPol:
            return v * (Scalar(1) - x * x) + k * x_delayed;
        case SystemKind::ErneuxGrasman:
            return v * (Scalar(1) - x * x) + k * x_delayed - k * x;
    }
    return Scalar(0);
}

/// (dx/dt, dv/dt) of the first-order form of the DDE.
template <typename Scalar>
Vec2<Scalar> full_rhs(const SystemSpec& spec, Scalar x, Scalar v, Scalar x_delayed) {
    const Scalar eps = static_cast<Scalar>(spec.epsilon);
    return Vec2<Scalar>(v, -x + eps * forcing(spec, x, v, x_delayed));
}

inline Vec2<double> full_rhs(const SystemSpec& spec, const FullState& state, double x_delayed) {
    return full_rhs<double>(spec, state.x, state.v, x_delayed);
}

/// Value of the exact characteristic function D(lambda, T) at lambda = i*omega
/// with its partial derivatives in omega and T.
template <typename Scalar>
struct CharacteristicValue {
    std::complex<Scalar> value;
    std::complex<Scalar> d_omega;
    std::complex<Scalar> d_delay;
};

/// D(lambda) = lambda^2 + c1 lambda + c0 - eps k exp(-lambda T), where the
/// Erneux kind carries the -k x term in its stiffness: c0 = 1 + eps k.
template <typename Scalar>
CharacteristicValue<Scalar> exact_characteristic(const SystemSpec& spec, Scalar omega, Scalar delay) {
    using Complex = std::complex<Scalar>;
    const Scalar eps = static_cast<Scalar>(spec.epsilon);
    const Scalar k = static_cast<Scalar>(spec.k);

    Scalar c1{};
    Scalar c0 = Scalar(1);
    switch (spec.kind) {
        case SystemKind::Duffing: c1 = eps * static_cast<Scalar>(spec.alpha); break;
        case SystemKind::VanDerPol: c1 = -eps; break;
        case SystemKind::ErneuxGrasman:
            c1 = -eps;
            c0 = Scalar(1) + eps * k;
            break;
    }

    const Complex lambda(Scalar(0), omega);
    const Complex delayed = std::exp(-lambda * delay);
    const Complex d_lambda = Scalar(2) * lambda + c1 + eps * k * delay * delayed;

    CharacteristicValue<Scalar> out;
    out.value = lambda * lambda + c1 * lambda + c0 - eps * k * delayed;
    out.d_omega = Complex(Scalar(0), Scalar(1)) * d_lambda;
    out.d_delay = eps * k * lambda * delayed;
    return out;
}

template <typename Scalar>
ResidualPair<Scalar> exact_char_residual(const SystemSpec& spec, Scalar omega, Scalar delay) {
    const auto d = exact_characteristic(spec, omega, delay);
    return {d.value.real(), d.value.imag()};
}

inline ResidualPair<double> exact_char_residual(const SystemSpec& spec, double omega, double delay) {
    return exact_char_residual<double>(spec, omega, delay);
}

}  // namespace hopfdelay
