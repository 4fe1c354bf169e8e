#include "hopfdelay/ddesim.hpp"

#include <algorithm>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <sstream>

namespace hopfdelay {

History History::constant(double value) {
    std::ostringstream desc;
    desc << "const:" << std::setprecision(17) << value;
    return {[value](double) { return value; }, desc.str()};
}

double effective_step(double dt, double delay, double output_stride) {
    if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
    if (!(delay >= 0.0)) throw InvalidArgument("delay must be non-negative");
    const double stride = output_stride > 0.0 ? output_stride : dt;
    const double cap = delay > 0.0 ? std::min(dt, delay / 4.0) : dt;
    const double pieces = std::max(1.0, std::ceil(stride / cap - 1e-9));
    return stride / pieces;
}

namespace {

struct StepPlan {
    double step;
    long steps;
    long observe_every;
};

StepPlan plan_steps(double dt, double delay, double t_end, double output_stride) {
    if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");
    const double stride = output_stride > 0.0 ? output_stride : dt;
    const double step = effective_step(dt, delay, stride);
    const long per_output = std::lround(stride / step);
    const long outputs = static_cast<long>(std::floor(t_end / stride + 1e-9));
    return {step, outputs * per_output, per_output};
}

}  // namespace

Trajectory integrate(const SystemSpec& spec, double delay, const IntegrateOptions& opts) {
    const StepPlan plan = plan_steps(opts.dt, delay, opts.t_end, opts.output_stride);
    const History history = opts.history.fn ? opts.history : History::constant(opts.x0);

    Trajectory traj;
    traj.meta = {spec, delay, opts.dt, plan.step, history.description};
    const auto expected = static_cast<std::size_t>(plan.steps / plan.observe_every + 1);
    traj.t.reserve(expected);
    traj.x.reserve(expected);
    traj.v.reserve(expected);

    using State = Eigen::Vector2d;
    auto rhs = [&spec](double, const State& y, const State& lagged) {
        return full_rhs<double>(spec, y(0), y(1), lagged(0));
    };
    auto pre = [fn = history.fn](double t) { return State(fn(t), 0.0); };
    auto observe = [&traj](double t, const State& y) {
        traj.t.push_back(t);
        traj.x.push_back(y(0));
        traj.v.push_back(y(1));
    };

    const bool ok = run_method_of_steps<2>(rhs, delay, State(opts.x0, opts.v0), pre, plan.step, plan.steps,
                                           plan.observe_every, observe, opts.blowup);
    traj.overflow = !ok;
    return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,x,v\n" << std::setprecision(17);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out << traj.t[i] << ',' << traj.x[i] << ',' << traj.v[i] << '\n';
    }
}

SlowTrajectory integrate_slowflow(const SystemSpec& spec, double delay, const PlaneState& initial,
                                  const SlowFlowOptions& opts) {
    const double slow_delay = opts.undelayed ? 0.0 : spec.epsilon * delay;
    const StepPlan plan = plan_steps(opts.dt_eta, slow_delay, opts.eta_end, opts.output_stride);

    using State = Eigen::Vector2d;
    const bool undelayed = opts.undelayed;
    const bool linear = opts.linearized;
    auto rhs = [&spec, delay, undelayed, linear](double, const State& y, const State& lagged) -> State {
        const State& d = undelayed ? y : lagged;
        return linear ? linearized_cartesian_rhs<double>(spec, delay, y, d) : cartesian_rhs<double>(spec, delay, y, d);
    };
    const State start = initial.vector();
    auto pre = [start](double) { return start; };

    SlowTrajectory traj;
    auto observe = [&traj, &initial](double eta, const State& y) {
        traj.eta.push_back(initial.eta + eta);
        traj.A.push_back(y(0));
        traj.B.push_back(y(1));
    };
    traj.overflow =
        !run_method_of_steps<2>(rhs, slow_delay, start, pre, plan.step, plan.steps, plan.observe_every, observe,
                                opts.blowup);
    return traj;
}

std::string_view to_string(LongRunKind kind) {
    switch (kind) {
        case LongRunKind::DecayToOrigin: return "DecayToOrigin";
        case LongRunKind::LimitCycle: return "LimitCycle";
        case LongRunKind::Growth: return "Growth";
    }
    return "unknown";
}

LongRunClass classify_long_run(const Trajectory& traj, const ClassifyOptions& opts) {
    if (traj.overflow) return {LongRunKind::Growth, 0.0, 0.0};
    const std::size_t n = traj.size();
    if (n < 16) throw InsufficientDataError("trajectory too short to classify");

    const auto tail_start = static_cast<std::size_t>(std::floor((1.0 - opts.settle_fraction) * n));
    std::vector<double> peak_values;
    std::vector<double> peak_times;
    for (std::size_t i = std::max<std::size_t>(tail_start, 1); i + 1 < n; ++i) {
        const double here = std::abs(traj.x[i]);
        if (here >= std::abs(traj.x[i - 1]) && here > std::abs(traj.x[i + 1])) {
            peak_values.push_back(here);
            peak_times.push_back(traj.t[i]);
        }
    }

    double tail_max = 0.0;
    for (std::size_t i = tail_start; i < n; ++i) tail_max = std::max(tail_max, std::abs(traj.x[i]));

    if (peak_values.size() < static_cast<std::size_t>(opts.min_extrema)) {
        if (tail_max < opts.decay_floor) return {LongRunKind::DecayToOrigin, 0.0, 0.0};
        // Non-oscillatory drift away from the origin.
        const double first = std::abs(traj.x[tail_start]);
        const double last = std::abs(traj.x[n - 1]);
        if (last > first && last >= tail_max) return {LongRunKind::Growth, 0.0, 0.0};
        throw InsufficientDataError("tail window holds fewer than " + std::to_string(opts.min_extrema) +
                                    " extrema");
    }

    // |x| peaks come every half period.
    const double spacing = (peak_times.back() - peak_times.front()) / static_cast<double>(peak_times.size() - 1);
    const double omega = spacing > 0.0 ? std::numbers::pi / spacing : 0.0;

    const std::size_t count = peak_values.size();
    const std::size_t window = std::max<std::size_t>(2, count / 4);
    const double head = std::accumulate(peak_values.begin(), peak_values.begin() + window, 0.0) / window;
    const double tail = std::accumulate(peak_values.end() - window, peak_values.end(), 0.0) / window;
    const double mean = std::accumulate(peak_values.begin(), peak_values.end(), 0.0) / count;
    const auto [lo, hi] = std::minmax_element(peak_values.begin(), peak_values.end());

    if (mean < opts.decay_floor) return {LongRunKind::DecayToOrigin, 0.0, omega};
    if ((*hi - *lo) / mean < opts.plateau_spread) return {LongRunKind::LimitCycle, mean, omega};
    if (tail > head * (1.0 + opts.trend_threshold)) return {LongRunKind::Growth, 0.0, omega};
    if (tail < head * (1.0 - opts.trend_threshold)) return {LongRunKind::DecayToOrigin, 0.0, omega};

    std::ostringstream msg;
    msg << "peaks neither settle nor trend (spread " << (*hi - *lo) / mean << ")";
    throw AmbiguousClassificationError(msg.str(), traj.meta.delay);
}

namespace {

double default_t_end(const SystemSpec& spec, const DetectOptions& opts) {
    return opts.t_end > 0.0 ? opts.t_end : 400.0 / spec.epsilon;
}

Branch infer_branch(const SystemSpec& spec, double delay) {
    try {
        const DelayPair t0 = approach1_delays(spec);
        return std::abs(delay - t0.lower) <= std::abs(delay - t0.upper) ? Branch::Lower : Branch::Upper;
    } catch (const NoHopfError&) {
        return Branch::Lower;
    }
}

}  // namespace

bool origin_unstable(const SystemSpec& spec, double delay, const DetectOptions& opts, LongRunClass* cls) {
    IntegrateOptions io;
    io.dt = opts.dt;
    io.t_end = default_t_end(spec, opts);
    io.x0 = opts.x0;
    io.v0 = opts.v0;
    for (int attempt = 0;; ++attempt) {
        try {
            const LongRunClass c = classify_long_run(integrate(spec, delay, io), opts.classify);
            if (cls != nullptr) *cls = c;
            return c.kind != LongRunKind::DecayToOrigin;
        } catch (const AmbiguousClassificationError&) {
            if (attempt >= opts.max_extensions) throw;
            io.t_end *= 2.0;
        }
    }
}

HopfPoint detect_hopf_bisection(const SystemSpec& base, double k, double delay_lo, double delay_hi,
                                const DetectOptions& opts) {
    if (!(delay_lo >= 0.0) || !(delay_hi > delay_lo)) {
        throw InvalidArgument("bisection bracket must satisfy 0 <= T_lo < T_hi");
    }
    if (!(opts.tol_delay > 0.0)) throw InvalidArgument("bisection tolerance must be positive");
    SystemSpec spec = base;
    spec.k = k;
    validate(spec);

    LongRunClass lo_class;
    LongRunClass hi_class;
    const bool lo_unstable = origin_unstable(spec, delay_lo, opts, &lo_class);
    const bool hi_unstable = origin_unstable(spec, delay_hi, opts, &hi_class);
    if (lo_unstable == hi_unstable) {
        std::ostringstream msg;
        msg << "no stability change of the origin in T in [" << delay_lo << ", " << delay_hi << "]: both ends "
            << to_string(lo_class.kind);
        throw NoCrossingError(msg.str());
    }

    double lo = delay_lo;
    double hi = delay_hi;
    LongRunClass unstable_class = lo_unstable ? lo_class : hi_class;
    while (hi - lo > opts.tol_delay) {
        const double mid = 0.5 * (lo + hi);
        LongRunClass mid_class;
        const bool mid_unstable = origin_unstable(spec, mid, opts, &mid_class);
        if (mid_unstable) unstable_class = mid_class;
        if (mid_unstable == lo_unstable) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    const double delay = 0.5 * (lo + hi);
    return {k, delay, unstable_class.omega, infer_branch(spec, delay), Method::Simulated};
}

}  // namespace hopfdelay
