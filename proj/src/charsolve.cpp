#include "hopfdelay/charsolve.hpp"

#include <Eigen/LU>

#include <sstream>

namespace hopfdelay {

namespace {

Linearization linearize(const CharacteristicValue<double>& d, const ResidualPair<double>& residual) {
    Linearization out;
    out.residual = residual.vector();
    out.jacobian << d.d_omega.real(), d.d_delay.real(), d.d_omega.imag(), d.d_delay.imag();
    return out;
}

bool finite(const Vec2<double>& v) {
    return std::isfinite(v(0)) && std::isfinite(v(1));
}

}  // namespace

ResidualFunction make_residual(const SystemSpec& spec, CharTarget target) {
    if (target == CharTarget::SlowFlow) {
        return [spec](const Vec2<double>& z) {
            return linearize(slowflow_characteristic<double>(spec, z(0), z(1)),
                             slowflow_char_residual<double>(spec, z(0), z(1)));
        };
    }
    return [spec](const Vec2<double>& z) {
        const auto d = exact_characteristic<double>(spec, z(0), z(1));
        return linearize(d, {d.value.real(), d.value.imag()});
    };
}

double characteristic_residual_norm(const SystemSpec& spec, CharTarget target, double omega, double delay) {
    if (target == CharTarget::SlowFlow) return slowflow_char_residual<double>(spec, omega, delay).norm();
    return exact_char_residual<double>(spec, omega, delay).norm();
}

NewtonResult newton_solve(const ResidualFunction& fn, const Vec2<double>& initial, const NewtonOptions& opts) {
    if (!finite(initial)) throw InvalidArgument("Newton seed must be finite");
    if (!(opts.tol > 0.0)) throw InvalidArgument("Newton tolerance must be positive");

    Vec2<double> z = initial;
    Linearization lin = fn(z);
    double norm = lin.residual.norm();

    for (int iter = 0;; ++iter) {
        if (!std::isfinite(norm)) {
            throw DivergenceError("Newton iterate became non-finite", z(0), z(1), norm);
        }
        if (norm < opts.tol) {
            // One undamped polishing step: the residual can be flat in T, so a
            // tolerance-level residual may still leave a visible error in the root.
            if (std::abs(lin.jacobian.determinant()) >= opts.singular_det) {
                const Vec2<double> polished = z - lin.jacobian.inverse() * lin.residual;
                const double polished_norm = fn(polished).residual.norm();
                if (polished_norm <= norm) return {polished(0), polished(1), polished_norm, iter};
            }
            return {z(0), z(1), norm, iter};
        }
        if (iter >= opts.max_iter) {
            std::ostringstream msg;
            msg << "Newton did not converge in " << opts.max_iter << " iterations (residual " << norm << ")";
            throw DivergenceError(msg.str(), z(0), z(1), norm);
        }

        const double det = lin.jacobian.determinant();
        if (!(std::abs(det) >= opts.singular_det)) {
            throw SingularStepError("singular Jacobian in Newton step", z(0), z(1));
        }
        const Vec2<double> step = -lin.jacobian.inverse() * lin.residual;

        // Halve until the residual decreases; keep the shortest step otherwise.
        double scale = 1.0;
        Vec2<double> trial = z + step;
        Linearization trial_lin = fn(trial);
        double trial_norm = trial_lin.residual.norm();
        for (int h = 0; h < opts.max_halvings && !(trial_norm < norm); ++h) {
            scale *= 0.5;
            trial = z + scale * step;
            trial_lin = fn(trial);
            trial_norm = trial_lin.residual.norm();
        }
        z = trial;
        lin = trial_lin;
        norm = trial_norm;
    }
}

Vec2<double> closed_form_seed(const SystemSpec& spec, Branch branch, CharTarget target, int n) {
    const HopfPoint base = approach1_point(spec, branch, n);
    if (target == CharTarget::SlowFlow) return {base.omega, base.delay};

    const double frequency = 1.0 + frequency_shift_sign(spec.kind, branch) * spec.epsilon * base.omega;
    if (!(frequency > 0.0)) {
        throw SeriesDivergenceError("no positive exact-frequency seed on the " + std::string(to_string(branch)) +
                                    " branch (eps*omega0 >= 1)");
    }
    return {frequency, base.delay / frequency};
}

SystemSpec with_parameter(SystemSpec spec, SweepParameter parameter, double value) {
    if (parameter == SweepParameter::K) {
        spec.k = value;
    } else {
        spec.epsilon = value;
    }
    return spec;
}

std::vector<double> sweep_grid(const Sweep& sweep) {
    if (sweep.steps < 1) throw InvalidArgument("sweep needs at least one grid point");
    if (!std::isfinite(sweep.from) || !std::isfinite(sweep.to)) throw InvalidArgument("sweep bounds must be finite");
    std::vector<double> grid(static_cast<std::size_t>(sweep.steps));
    if (sweep.steps == 1) {
        grid[0] = sweep.from;
        return grid;
    }
    const double h = (sweep.to - sweep.from) / (sweep.steps - 1);
    for (int i = 0; i < sweep.steps; ++i) grid[static_cast<std::size_t>(i)] = sweep.from + i * h;
    grid.back() = sweep.to;
    return grid;
}

SweepResult continuation_sweep(const SystemSpec& base, const Sweep& sweep, Branch branch, CharTarget target,
                               const ContinuationOptions& opts) {
    const std::vector<double> grid = sweep_grid(sweep);
    return continuation_sweep(base, sweep.parameter, grid, branch, target, opts);
}

SweepResult continuation_sweep(const SystemSpec& base, SweepParameter parameter, std::span<const double> grid,
                               Branch branch, CharTarget target, const ContinuationOptions& opts) {
    if (grid.empty()) throw InvalidArgument("continuation grid is empty");
    const Method method = target == CharTarget::SlowFlow ? Method::ApproachII : Method::ExactChar;

    auto make_point = [&](double value, const NewtonResult& root) {
        CurvePoint cp;
        cp.sweep_value = value;
        const SystemSpec spec = with_parameter(base, parameter, value);
        cp.point = {spec.k, root.delay, root.omega, branch, method};
        cp.residual_norm = root.residual_norm;
        cp.iterations = root.iterations;
        return cp;
    };

    SweepResult result;

    // First point: closed-form seed, failures propagate.
    const SystemSpec first_spec = with_parameter(base, parameter, grid.front());
    const Vec2<double> seed = closed_form_seed(first_spec, branch, target, opts.branch_index);
    const NewtonResult first = newton_solve(make_residual(first_spec, target), seed, opts.newton);
    if (!(first.omega > opts.min_omega) || !(first.delay >= 0.0)) {
        throw DivergenceError("first continuation point converged outside omega > 0, T >= 0", first.omega,
                              first.delay, first.residual_norm);
    }
    result.points.push_back(make_point(grid.front(), first));

    // Accepted states, including intermediate sub-steps, for the secant.
    double prev_param = grid.front();
    Vec2<double> prev_z(first.omega, first.delay);
    bool have_secant = false;
    double older_param = 0.0;
    Vec2<double> older_z = prev_z;

    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double target_param = grid[i];
        NewtonResult last{};
        bool reached = false;
        double h = target_param - prev_param;
        const double min_step = std::abs(h) * std::ldexp(1.0, -opts.max_step_halvings);

        while (!reached) {
            const double param = (std::abs(target_param - prev_param) <= std::abs(h)) ? target_param : prev_param + h;
            const double step = param - prev_param;
            Vec2<double> predicted = prev_z;
            if (have_secant) predicted += (prev_z - older_z) * (step / (prev_param - older_param));

            const SystemSpec spec = with_parameter(base, parameter, param);
            bool accepted = false;
            try {
                const NewtonResult root = newton_solve(make_residual(spec, target), predicted, opts.newton);
                const double predicted_change = std::abs(predicted(1) - prev_z(1));
                const double change = std::abs(root.delay - prev_z(1));
                const double bound = opts.continuity_factor * predicted_change +
                                     opts.continuity_slack * (1.0 + std::abs(prev_z(1)));
                accepted = root.omega > opts.min_omega && root.delay >= 0.0 && change <= bound;
                if (accepted) last = root;
            } catch (const NumericalError&) {
                accepted = false;
            }

            if (!accepted) {
                h *= 0.5;
                if (std::abs(h) < min_step) break;
                continue;
            }

            older_param = prev_param;
            older_z = prev_z;
            have_secant = true;
            h *= 2.0;
            prev_param = param;
            prev_z = Vec2<double>(last.omega, last.delay);
            reached = param == target_param;
        }

        if (!reached) {
            std::ostringstream msg;
            msg << "continuation of the " << to_string(branch) << " branch stopped near "
                << (parameter == SweepParameter::K ? "k" : "eps") << " = " << prev_param
                << " before reaching grid value " << target_param;
            result.truncated = true;
            result.warning = msg.str();
            break;
        }
        result.points.push_back(make_point(target_param, last));
    }
    return result;
}

}  // namespace hopfdelay
