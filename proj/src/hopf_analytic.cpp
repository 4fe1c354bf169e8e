#include "hopfdelay/hopf_analytic.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

namespace hopfdelay {

namespace {

constexpr double kPi = std::numbers::pi;

// arcsin of the Hopf condition's right-hand side: sin(T0) = -alpha/k or 1/k.
double condition_arcsin(const SystemSpec& spec) {
    if (spec.kind == SystemKind::Duffing) return std::asin(-spec.alpha / spec.k);
    return std::asin(1.0 / spec.k);
}

double base_t0(const SystemSpec& spec, Branch branch) {
    const double s = condition_arcsin(spec);
    if (spec.kind == SystemKind::Duffing) {
        return branch == Branch::Lower ? kPi - s : 2.0 * kPi + s;
    }
    return branch == Branch::Lower ? s : kPi - s;
}

}  // namespace

std::string_view to_string(Branch branch) {
    return branch == Branch::Lower ? "lower" : "upper";
}

std::string_view to_string(Method method) {
    switch (method) {
        case Method::ApproachI: return "approach1";
        case Method::ApproachII: return "approach2";
        case Method::ExactChar: return "exact";
        case Method::Simulated: return "simulated";
    }
    return "unknown";
}

std::optional<Branch> parse_branch(std::string_view name) {
    if (name == "lower") return Branch::Lower;
    if (name == "upper") return Branch::Upper;
    return std::nullopt;
}

std::optional<Method> parse_method(std::string_view name) {
    if (name == "approach1") return Method::ApproachI;
    if (name == "approach2") return Method::ApproachII;
    if (name == "exact") return Method::ExactChar;
    if (name == "simulated") return Method::Simulated;
    return std::nullopt;
}

void require_above_threshold(const SystemSpec& spec) {
    const double threshold = spec.kind == SystemKind::Duffing ? spec.alpha : 1.0;
    if (!(spec.k > threshold)) {
        std::ostringstream msg;
        msg << "no Hopf bifurcation for " << to_string(spec.kind) << ": k = " << spec.k
            << " is not above the threshold " << threshold;
        throw NoHopfError(msg.str());
    }
}

DelayPair approach1_delays(const SystemSpec& spec, int n) {
    require_above_threshold(spec);
    const double shift = 2.0 * kPi * n;
    return {base_t0(spec, Branch::Lower) + shift, base_t0(spec, Branch::Upper) + shift};
}

HopfPoint approach1_point(const SystemSpec& spec, Branch branch, int n) {
    require_above_threshold(spec);
    const double t0 = base_t0(spec, branch) + 2.0 * kPi * n;
    // Eigenvalues of the approach I Jacobian are diag +- i*off; the trace
    // vanishes at t0, so the Hopf frequency is |off|.
    const auto lin = linear_slow_terms<double>(spec);
    const double omega = std::abs(lin.rotation + 0.5 * spec.k * std::cos(t0));
    return {spec.k, t0, omega, branch, Method::ApproachI};
}

BranchPair approach1_points(const SystemSpec& spec, int n) {
    return {approach1_point(spec, Branch::Lower, n), approach1_point(spec, Branch::Upper, n)};
}

CriticalOmega approach2_omega(const SystemSpec& spec) {
    require_above_threshold(spec);
    const double k2 = spec.k * spec.k;
    switch (spec.kind) {
        case SystemKind::Duffing: {
            const double w = std::sqrt(k2 - spec.alpha * spec.alpha) / 2.0;
            return {w, w};
        }
        case SystemKind::VanDerPol: {
            const double w = std::sqrt(k2 - 1.0) / 2.0;
            return {w, w};
        }
        case SystemKind::ErneuxGrasman: {
            const double root = 0.5 * spec.k * std::sqrt(k2 - 1.0);
            // k^2/2 - 1/4 - root is (k - sqrt(k^2-1))^2 / 4 >= 0; clamp rounding.
            return {std::sqrt(std::max(0.0, k2 / 2.0 - 0.25 - root)), std::sqrt(k2 / 2.0 - 0.25 + root)};
        }
    }
    return {};
}

int frequency_shift_sign(SystemKind kind, Branch branch) {
    switch (kind) {
        case SystemKind::Duffing: return branch == Branch::Lower ? +1 : -1;
        case SystemKind::VanDerPol: return branch == Branch::Lower ? -1 : +1;
        case SystemKind::ErneuxGrasman: return +1;
    }
    return +1;
}

HopfPoint approach2_point(const SystemSpec& spec, Branch branch, int n, ErneuxPairing pairing) {
    const CriticalOmega omegas = approach2_omega(spec);
    double omega = omegas.cr1;
    if (spec.kind == SystemKind::ErneuxGrasman) {
        const bool lower_takes_cr1 = pairing == ErneuxPairing::Consistent;
        omega = (branch == Branch::Lower) == lower_takes_cr1 ? omegas.cr1 : omegas.cr2;
    }

    const int sign = frequency_shift_sign(spec.kind, branch);
    const double denominator = 1.0 + sign * spec.epsilon * omega;
    if (sign < 0 && !(spec.epsilon * omega < 1.0)) {
        std::ostringstream msg;
        msg << "approach II series diverges on the " << to_string(branch) << " branch: eps*omega = "
            << spec.epsilon * omega << " >= 1";
        throw SeriesDivergenceError(msg.str());
    }
    const double t0 = base_t0(spec, branch) + 2.0 * kPi * n;
    return {spec.k, t0 / denominator, omega, branch, Method::ApproachII};
}

BranchPair approach2_delays(const SystemSpec& spec, int n, ErneuxPairing pairing) {
    return {approach2_point(spec, Branch::Lower, n, pairing), approach2_point(spec, Branch::Upper, n, pairing)};
}

double series_partial_sum(double t0, double eps_omega, int sign, int terms) {
    if (terms < 0) throw InvalidArgument("series_partial_sum needs a non-negative term count");
    const double ratio = (sign >= 0 ? 1.0 : -1.0) * eps_omega;
    double sum = 0.0;
    double term = 1.0;
    for (int i = 0; i <= terms; ++i) {
        sum += term;
        term *= ratio;
    }
    return t0 * sum;
}

}  // namespace hopfdelay
