#pragma once

// Closed-form Hopf conditions of the slow flows.
//
// Approach I replaces the delayed slow-flow variables by undelayed ones; the
// origin of the resulting ODE loses stability where k sin(T0) = -alpha
// (Duffing) or k sin(T0) = 1 (van der Pol, Erneux-Grasman).
//
// Approach II keeps the slow-flow delay eps*T. Its critical delays are the
// summed perturbation series T0 * sum (+-eps*omega)^n = T0 / (1 -+ eps*omega).

#include <cmath>
#include <optional>
#include <string_view>

#include "hopfdelay/slowflow.hpp"
#include "hopfdelay/systems.hpp"

namespace hopfdelay {

enum class Branch { Lower, Upper };
enum class Method { ApproachI, ApproachII, ExactChar, Simulated };

std::string_view to_string(Branch branch);
std::string_view to_string(Method method);
std::optional<Branch> parse_branch(std::string_view name);
std::optional<Method> parse_method(std::string_view name);

/// A critical (k, T) pair. omega is the frequency in the method's own time
/// scale: slow time for the approach I/II points, fast time for exact and
/// simulated points.
struct HopfPoint {
    double k = 0.0;
    double delay = 0.0;
    double omega = 0.0;
    Branch branch = Branch::Lower;
    Method method = Method::ApproachI;
};

struct BranchPair {
    HopfPoint lower;
    HopfPoint upper;
};

struct DelayPair {
    double lower = 0.0;
    double upper = 0.0;
};

/// Critical slow-flow frequencies. Duffing and van der Pol have a single
/// frequency (cr1 == cr2); Erneux-Grasman has two.
struct CriticalOmega {
    double cr1 = 0.0;
    double cr2 = 0.0;
};

/// How the Erneux-Grasman frequencies are paired with the two delay branches.
/// AsPrinted pairs omega_cr1 with pi - arcsin(1/k) and omega_cr2 with
/// arcsin(1/k). Consistent uses the pairing that zeroes the slow-flow
/// characteristic residual (omega_cr1 with arcsin(1/k)).
enum class ErneuxPairing { AsPrinted, Consistent };

/// Throws NoHopfError when k is at or below the Hopf threshold.
void require_above_threshold(const SystemSpec& spec);

/// Principal T0 branches, shifted by 2*pi*n.
DelayPair approach1_delays(const SystemSpec& spec, int n = 0);

HopfPoint approach1_point(const SystemSpec& spec, Branch branch, int n = 0);
BranchPair approach1_points(const SystemSpec& spec, int n = 0);

CriticalOmega approach2_omega(const SystemSpec& spec);

/// Summed-series critical delay on one branch. Throws SeriesDivergenceError
/// when that branch's denominator is 1 - eps*omega with eps*omega >= 1.
HopfPoint approach2_point(const SystemSpec& spec, Branch branch, int n = 0,
                          ErneuxPairing pairing = ErneuxPairing::AsPrinted);
BranchPair approach2_delays(const SystemSpec& spec, int n = 0, ErneuxPairing pairing = ErneuxPairing::AsPrinted);

/// +1 when the branch's approach II delay is T0 / (1 + eps*omega), -1 for
/// T0 / (1 - eps*omega). The exact DDE oscillates near 1 + sign * eps * omega
/// on that branch.
int frequency_shift_sign(SystemKind kind, Branch branch);

/// T0 * sum_{n=0}^{terms} (sign * eps_omega)^n.
double series_partial_sum(double t0, double eps_omega, int sign, int terms);

/// Jacobian of the undelayed (approach I) slow flow at the origin.
template <typename Scalar>
Mat2<Scalar> approach1_jacobian(const SystemSpec& spec, Scalar delay) {
    using std::cos;
    using std::sin;
    const auto lin = linear_slow_terms<Scalar>(spec);
    const Scalar half_k = static_cast<Scalar>(spec.k) / Scalar(2);
    const Scalar diag = lin.growth - half_k * sin(delay);
    const Scalar off = lin.rotation + half_k * cos(delay);
    Mat2<Scalar> jac;
    jac << diag, -off, off, diag;
    return jac;
}

}  // namespace hopfdelay
