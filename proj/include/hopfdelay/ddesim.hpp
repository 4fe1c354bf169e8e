#pragma once

// Direct simulation of the delayed oscillators and their slow flows.
//
// Fixed-step classic RK4 by the method of steps: delayed values at stage
// times are read from a HistoryBuffer. The step is capped at T/4 so every
// delayed stage time lies strictly inside the already computed solution.

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "hopfdelay/hopf_analytic.hpp"
#include "hopfdelay/history_buffer.hpp"
#include "hopfdelay/slowflow.hpp"
#include "hopfdelay/systems.hpp"

namespace hopfdelay {

/// Scalar history x(t) for t <= 0.
struct History {
    std::function<double(double)> fn;
    std::string description;

    static History constant(double value);
};

/// Internal step used for a requested dt and delay: the largest step
/// <= min(dt, T/4) that divides the output stride.
double effective_step(double dt, double delay, double output_stride);

/// Fixed-step RK4 for y' = rhs(t, y, y(t - delay)).
///
/// With delay == 0 the delayed argument is the current stage value. Returns
/// false when the state left the finite range (or exceeded blowup) before
/// all steps were taken; observe() has then seen only finite samples.
template <int N, typename Rhs, typename Observer>
bool run_method_of_steps(Rhs&& rhs, double delay, const Eigen::Matrix<double, N, 1>& y0,
                         typename HistoryBuffer<N>::PreHistory pre_history, double step, long steps, long observe_every,
                         Observer&& observe, double blowup = 1e10) {
    using State = Eigen::Matrix<double, N, 1>;
    HistoryBuffer<N> history(std::move(pre_history));
    const bool delayed = delay > 0.0;

    auto lagged = [&](double t, const State& current) -> State { return delayed ? history(t - delay) : current; };

    double t = 0.0;
    State y = y0;
    State f = rhs(t, y, lagged(t, y));
    if (delayed) history.push(t, y, f);
    observe(t, y);

    for (long n = 1; n <= steps; ++n) {
        const double half = 0.5 * step;
        const State k1 = f;
        const State y2 = y + half * k1;
        const State k2 = rhs(t + half, y2, lagged(t + half, y2));
        const State y3 = y + half * k2;
        const State k3 = rhs(t + half, y3, lagged(t + half, y3));
        const State y4 = y + step * k3;
        const State k4 = rhs(t + step, y4, lagged(t + step, y4));

        const State next = y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!next.allFinite() || next.cwiseAbs().maxCoeff() > blowup) return false;

        y = next;
        t = n * step;
        f = rhs(t, y, lagged(t, y));
        if (delayed) {
            history.push(t, y, f);
            history.discard_before(t - delay - 2.0 * step);
        }
        if (n % observe_every == 0) observe(t, y);
    }
    return true;
}

struct TrajectoryMeta {
    SystemSpec spec;
    double delay = 0.0;
    double dt = 0.0;
    double step = 0.0;
    std::string history;
};

/// Uniformly sampled x(t), v(t).
struct Trajectory {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> v;
    TrajectoryMeta meta;
    bool overflow = false;

    std::size_t size() const { return t.size(); }
};

struct IntegrateOptions {
    double dt = 0.01;
    double t_end = 100.0;
    double output_stride = 0.0;  // 0 means dt
    double x0 = 0.1;
    double v0 = 0.0;
    History history;  // empty means constant x0
    double blowup = 1e10;
};

Trajectory integrate(const SystemSpec& spec, double delay, const IntegrateOptions& opts);

/// Writes `t,x,v` with 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

struct SlowTrajectory {
    std::vector<double> eta;
    std::vector<double> A;
    std::vector<double> B;
    bool overflow = false;

    std::size_t size() const { return eta.size(); }
};

struct SlowFlowOptions {
    double dt_eta = 0.01;
    double eta_end = 10.0;
    double output_stride = 0.0;  // 0 means dt_eta
    bool undelayed = false;      // approach I dynamics: delayed == current
    bool linearized = false;
    double blowup = 1e10;
};

/// Integrates the slow flow with slow-time delay eps*T; the history is the
/// constant initial state.
SlowTrajectory integrate_slowflow(const SystemSpec& spec, double delay, const PlaneState& initial,
                                  const SlowFlowOptions& opts);

enum class LongRunKind { DecayToOrigin, LimitCycle, Growth };

std::string_view to_string(LongRunKind kind);

struct LongRunClass {
    LongRunKind kind = LongRunKind::DecayToOrigin;
    double amplitude = 0.0;  // mean tail peak for LimitCycle
    double omega = 0.0;      // from the tail peak spacing, 0 when not oscillating
};

struct ClassifyOptions {
    double settle_fraction = 0.25;
    double plateau_spread = 0.02;   // (max - min) / mean of the tail peaks
    double trend_threshold = 0.01;  // relative change between the first and last quarter of the peaks
    double decay_floor = 1e-6;
    int min_extrema = 10;
};

/// Peak-envelope classification of the trailing settle_fraction of a run.
/// Throws InsufficientDataError when the tail has too few extrema to decide,
/// AmbiguousClassificationError when the peaks neither trend nor settle.
LongRunClass classify_long_run(const Trajectory& traj, const ClassifyOptions& opts = {});

struct DetectOptions {
    double tol_delay = 1e-3;
    double dt = 0.01;
    double t_end = 0.0;  // 0 means 400 / eps
    double x0 = 0.1;
    double v0 = 0.0;
    ClassifyOptions classify;
    int max_extensions = 2;
};

/// True when a run from (x0, v0) does not decay to the origin. An ambiguous
/// classification is retried with the run length doubled, up to max_extensions
/// times.
bool origin_unstable(const SystemSpec& spec, double delay, const DetectOptions& opts, LongRunClass* cls = nullptr);

/// Bisects the origin-stability boundary in T inside [delay_lo, delay_hi].
/// Throws NoCrossingError when both ends classify alike.
HopfPoint detect_hopf_bisection(const SystemSpec& spec, double k, double delay_lo, double delay_hi,
                                const DetectOptions& opts = {});

}  // namespace hopfdelay
