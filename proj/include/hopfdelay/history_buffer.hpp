#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <utility>

#include <Eigen/Core>

#include "hopfdelay/errors.hpp"

namespace hopfdelay {

/// Past states of a DDE solution with cubic Hermite dense output.
///
/// Samples carry (t, y, dy/dt) and must be pushed with strictly increasing t.
/// Queries before the first sample fall back to the pre-history function;
/// queries past the newest sample are an error.
template <int N>
class HistoryBuffer {
public:
    using State = Eigen::Matrix<double, N, 1>;
    using PreHistory = std::function<State(double)>;

    struct Sample {
        double t;
        State y;
        State dy;
    };

    explicit HistoryBuffer(PreHistory pre_history) : pre_history_(std::move(pre_history)) {}

    void push(double t, const State& y, const State& dy) {
        if (!samples_.empty() && !(t > samples_.back().t)) {
            throw InvalidArgument("history samples must have strictly increasing times");
        }
        samples_.push_back({t, y, dy});
    }

    /// Drops samples no longer needed for queries at or after t_min, always
    /// keeping the sample that brackets t_min from below.
    void discard_before(double t_min) {
        while (samples_.size() > 2 && samples_[1].t <= t_min) samples_.pop_front();
    }

    State operator()(double t) const {
        if (samples_.empty() || t < samples_.front().t) return pre_history_(t);
        if (t > samples_.back().t) throw InvalidArgument("history queried beyond the newest sample");

        auto hi = std::lower_bound(samples_.begin(), samples_.end(), t,
                                   [](const Sample& s, double value) { return s.t < value; });
        if (hi->t == t) return hi->y;
        auto lo = std::prev(hi);
        return hermite(*lo, *hi, t);
    }

    std::size_t size() const { return samples_.size(); }
    double front_time() const { return samples_.front().t; }
    double back_time() const { return samples_.back().t; }
    const Sample& back() const { return samples_.back(); }

    static State hermite(const Sample& a, const Sample& b, double t) {
        const double h = b.t - a.t;
        const double s = (t - a.t) / h;
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        const double h10 = s3 - 2.0 * s2 + s;
        const double h01 = -2.0 * s3 + 3.0 * s2;
        const double h11 = s3 - s2;
        return h00 * a.y + (h10 * h) * a.dy + h01 * b.y + (h11 * h) * b.dy;
    }

private:
    PreHistory pre_history_;
    std::deque<Sample> samples_;
};

}  // namespace hopfdelay
