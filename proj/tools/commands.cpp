#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hopfdelay/errors.hpp"

namespace hopfdelay::cli {

namespace {

bool above_threshold(const SystemSpec& spec) {
    try {
        require_above_threshold(spec);
        return true;
    } catch (const NoHopfError&) {
        return false;
    }
}

SystemSpec at_k(SystemSpec spec, double k) {
    spec.k = k;
    return spec;
}

void add_closed_form_rows(const SystemSpec& base, Method method, const CurveBuildOptions& opts, CurveBuild& build) {
    for (const double k : opts.k_grid) {
        const SystemSpec spec = at_k(base, k);
        for (const Branch branch : {Branch::Lower, Branch::Upper}) {
            try {
                const HopfPoint p = method == Method::ApproachI ? approach1_point(spec, branch)
                                                                : approach2_point(spec, branch, 0, opts.pairing);
                build.table.rows.push_back(make_row(spec, p));
            } catch (const NoHopfError&) {
                ++build.omitted;
            } catch (const SeriesDivergenceError&) {
                ++build.omitted;
            }
        }
    }
}

void add_exact_rows(const SystemSpec& base, const CurveBuildOptions& opts, CurveBuild& build) {
    std::vector<double> grid;
    for (const double k : opts.k_grid) {
        if (above_threshold(at_k(base, k))) grid.push_back(k);
    }
    const int below = static_cast<int>(opts.k_grid.size() - grid.size());
    build.omitted += 2 * below;
    if (grid.empty()) return;

    for (const Branch branch : {Branch::Lower, Branch::Upper}) {
        try {
            const SweepResult result =
                continuation_sweep(base, SweepParameter::K, grid, branch, CharTarget::ExactChar);
            for (const CurvePoint& cp : result.points) {
                build.table.rows.push_back(make_row(at_k(base, cp.sweep_value), cp.point));
            }
            build.omitted += static_cast<int>(grid.size() - result.points.size());
            if (result.truncated) {
                build.warnings.push_back("exact " + std::string(to_string(branch)) + ": " + result.warning);
            }
        } catch (const Error& e) {
            build.omitted += static_cast<int>(grid.size());
            build.warnings.push_back("exact " + std::string(to_string(branch)) + ": " + e.what());
        }
    }
}

void add_simulated_rows(const SystemSpec& base, const CurveBuildOptions& opts, CurveBuild& build) {
    for (const double k : opts.k_grid) {
        const SystemSpec spec = at_k(base, k);
        if (!above_threshold(spec)) {
            build.omitted += 2;
            continue;
        }
        const DelayPair t0 = approach1_delays(spec);
        const double mid = 0.5 * (t0.lower + t0.upper);
        const double lo_edge = std::min(0.05, 0.5 * t0.lower);
        const std::pair<Branch, std::pair<double, double>> brackets[] = {
            {Branch::Lower, {lo_edge, mid}},
            {Branch::Upper, {mid, 2.0 * t0.upper - mid}},
        };
        for (const auto& [branch, bracket] : brackets) {
            try {
                HopfPoint p = detect_hopf_bisection(spec, k, bracket.first, bracket.second, opts.detect);
                p.branch = branch;
                build.table.rows.push_back(make_row(spec, p));
            } catch (const NumericalError& e) {
                ++build.omitted;
                std::ostringstream msg;
                msg << "simulated " << to_string(branch) << " at k=" << k << ": " << e.what();
                build.warnings.push_back(msg.str());
            }
        }
    }
}

std::vector<double> linspace(double from, double to, int count) {
    if (count < 1) throw InvalidArgument("--k-steps must be at least 1");
    if (!(from <= to)) throw InvalidArgument("--k-min must not exceed --k-max");
    std::vector<double> grid(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        grid[static_cast<std::size_t>(i)] = count == 1 ? from : from + (to - from) * i / (count - 1);
    }
    return grid;
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<Method> methods;
    for (const std::string& name : names) {
        const auto m = parse_method(name);
        if (!m) throw InvalidArgument("unknown method '" + name + "'");
        if (std::find(methods.begin(), methods.end(), *m) == methods.end()) methods.push_back(*m);
    }
    if (methods.empty()) throw InvalidArgument("--methods is empty");
    return methods;
}

History parse_history(const std::string& text) {
    const std::string prefix = "const:";
    if (text.rfind(prefix, 0) != 0) throw InvalidArgument("--history must look like const:<value>");
    const std::string number = text.substr(prefix.size());
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
    if (ec != std::errc() || ptr != number.data() + number.size() || number.empty()) {
        throw InvalidArgument("--history: bad value '" + number + "'");
    }
    return History::constant(value);
}

// Writes to stdout for an empty path or "-", otherwise replaces the file.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    file << content;
    file.close();
    if (!file) throw IoError("failed writing '" + path + "'");
}

struct SystemFlags {
    std::string system = "duffing";
    double epsilon = 0.1;
    double alpha = 0.0;
    double gamma = 0.0;

    void attach(CLI::App* app) {
        app->add_option("--system", system, "duffing | vdp | erneux")->capture_default_str();
        app->add_option("--epsilon", epsilon, "small parameter")->capture_default_str();
        app->add_option("--alpha", alpha, "Duffing damping")->capture_default_str();
        app->add_option("--gamma", gamma, "Duffing cubic stiffness")->capture_default_str();
    }

    SystemSpec spec(double k = 0.0) const {
        const auto kind = parse_system_kind(system);
        if (!kind) throw InvalidArgument("unknown system '" + system + "'");
        SystemSpec s{*kind, epsilon, alpha, gamma, k};
        validate(s);
        return s;
    }
};

struct RangeFlags {
    double k_min = 0.0;
    double k_max = 0.0;
    int k_steps = 100;
    std::vector<std::string> methods;
    std::string pairing = "printed";
    std::string out;

    void attach(CLI::App* app, std::vector<std::string> default_methods) {
        methods = std::move(default_methods);
        app->add_option("--k-min", k_min, "smallest feedback gain")->required();
        app->add_option("--k-max", k_max, "largest feedback gain")->required();
        app->add_option("--k-steps", k_steps, "grid points, ends included")->capture_default_str();
        app->add_option("--methods", methods, "approach1,approach2,exact,simulated")
            ->delimiter(',')
            ->capture_default_str();
        app->add_option("--erneux-pairing", pairing, "printed | consistent")->capture_default_str();
        app->add_option("--out", out, "output CSV (stdout when omitted)");
    }

    ErneuxPairing erneux_pairing() const {
        if (pairing == "printed") return ErneuxPairing::AsPrinted;
        if (pairing == "consistent") return ErneuxPairing::Consistent;
        throw InvalidArgument("--erneux-pairing must be printed or consistent");
    }
};

void report_build(const CurveBuild& build, std::ostream& err) {
    for (const std::string& w : build.warnings) err << "warning: " << w << '\n';
    if (build.omitted > 0) err << "omitted " << build.omitted << " grid points where a method is undefined\n";
}

int cmd_hopf_curves(const SystemFlags& sys, const RangeFlags& range, const DetectOptions& detect, std::ostream& out,
                    std::ostream& err) {
    const SystemSpec spec = sys.spec();
    CurveBuildOptions opts;
    opts.k_grid = linspace(range.k_min, range.k_max, range.k_steps);
    opts.methods = parse_methods(range.methods);
    opts.pairing = range.erneux_pairing();
    opts.detect = detect;

    const CurveBuild build = build_curves(spec, opts);
    report_build(build, err);
    std::ostringstream csv;
    write_csv(csv, build.table);
    emit(range.out, csv.str(), out);
    return kSuccess;
}

struct SimulateFlags {
    double k = 0.0;
    double delay = 0.0;
    double dt = 0.01;
    double t_end = 0.0;
    double stride = 0.0;
    double x0 = 0.1;
    double v0 = 0.0;
    std::string history;
    std::string out;
};

int cmd_simulate(const SystemFlags& sys, const SimulateFlags& f, std::ostream& out, std::ostream& err) {
    const SystemSpec spec = sys.spec(f.k);
    IntegrateOptions opts;
    opts.dt = f.dt;
    opts.t_end = f.t_end > 0.0 ? f.t_end : 400.0 / spec.epsilon;
    opts.output_stride = f.stride;
    opts.x0 = f.x0;
    opts.v0 = f.v0;
    if (!f.history.empty()) opts.history = parse_history(f.history);

    const Trajectory traj = integrate(spec, f.delay, opts);
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    emit(f.out, csv.str(), out);

    try {
        const LongRunClass cls = classify_long_run(traj);
        err << "class=" << to_string(cls.kind) << std::setprecision(10) << " amplitude=" << cls.amplitude
            << " omega=" << cls.omega << '\n';
    } catch (const NumericalError& e) {
        err << "class=unclassified: " << e.what() << '\n';
        return kIntegration;
    }
    return kSuccess;
}

struct DetectFlags {
    double k = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::string append;
};

int cmd_detect_hopf(const SystemFlags& sys, const DetectFlags& f, const DetectOptions& detect, std::ostream& out,
                    std::ostream& err) {
    if (!(f.t_lo < f.t_hi)) throw InvalidArgument("--t-lo must be below --t-hi");
    const SystemSpec spec = sys.spec(f.k);
    HopfPoint p;
    try {
        p = detect_hopf_bisection(spec, f.k, f.t_lo, f.t_hi, detect);
    } catch (const NoCrossingError&) {
        throw;
    } catch (const NumericalError& e) {
        err << "error: integration failure: " << e.what() << '\n';
        return kIntegration;
    }

    out << std::setprecision(17) << p.k << ',' << p.delay << ',' << p.omega << ",method=simulated,branch="
        << to_string(p.branch) << '\n';

    if (!f.append.empty()) {
        const bool fresh = !std::filesystem::exists(f.append) || std::filesystem::file_size(f.append) == 0;
        std::ofstream file(f.append, std::ios::app);
        if (!file) throw IoError("cannot open '" + f.append + "' for appending");
        if (fresh) file << kCurveHeader << '\n';
        write_row(file, make_row(spec, p));
        if (!file) throw IoError("failed writing '" + f.append + "'");
    }
    return kSuccess;
}

int cmd_compare(const SystemFlags& sys, const RangeFlags& range, const std::string& reference_name,
                const DetectOptions& detect, std::ostream& out, std::ostream& err) {
    const SystemSpec spec = sys.spec();
    const auto reference = parse_method(reference_name);
    if (!reference) throw InvalidArgument("unknown reference method '" + reference_name + "'");
    const std::vector<Method> methods = parse_methods(range.methods);

    CurveBuildOptions opts;
    opts.k_grid = linspace(range.k_min, range.k_max, range.k_steps);
    opts.methods = methods;
    if (std::find(methods.begin(), methods.end(), *reference) == methods.end()) opts.methods.push_back(*reference);
    opts.pairing = range.erneux_pairing();
    opts.detect = detect;

    const CurveBuild build = build_curves(spec, opts);
    report_build(build, err);
    const auto report = compare_curves(build.table, *reference, methods);
    std::ostringstream csv;
    write_comparison_csv(csv, report);
    emit(range.out, csv.str(), out);
    return kSuccess;
}

void attach_detect(CLI::App* app, DetectOptions& detect) {
    app->add_option("--tol", detect.tol_delay, "bisection tolerance in T")->capture_default_str();
    app->add_option("--dt", detect.dt, "integration step")->capture_default_str();
    app->add_option("--t-end", detect.t_end, "run length per classification (default 400/eps)");
    app->add_option("--x0", detect.x0, "initial displacement")->capture_default_str();
}

}  // namespace

CurveBuild build_curves(const SystemSpec& spec, const CurveBuildOptions& opts) {
    CurveBuild build;
    for (const Method method : opts.methods) {
        switch (method) {
            case Method::ApproachI:
            case Method::ApproachII: add_closed_form_rows(spec, method, opts, build); break;
            case Method::ExactChar: add_exact_rows(spec, opts, build); break;
            case Method::Simulated: add_simulated_rows(spec, opts, build); break;
        }
    }
    build.table.sort();
    return build;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hopf bifurcation curves for oscillators with delayed self-feedback", "hopfdelay"};
    app.require_subcommand(1);

    SystemFlags curves_sys;
    RangeFlags curves_range;
    DetectOptions curves_detect;
    auto* curves = app.add_subcommand("hopf-curves", "critical delay curves over a k grid");
    curves_sys.attach(curves);
    curves_range.attach(curves, {"approach1", "approach2", "exact"});
    attach_detect(curves, curves_detect);

    SystemFlags sim_sys;
    SimulateFlags sim;
    auto* simulate = app.add_subcommand("simulate", "integrate the full delay equation");
    sim_sys.attach(simulate);
    simulate->add_option("--k", sim.k, "feedback gain")->capture_default_str();
    simulate->add_option("--delay", sim.delay, "delay T")->capture_default_str();
    simulate->add_option("--dt", sim.dt, "requested step")->capture_default_str();
    simulate->add_option("--t-end", sim.t_end, "final time (default 400/eps)");
    simulate->add_option("--stride", sim.stride, "output spacing (default dt)");
    simulate->add_option("--history", sim.history, "const:<value> (default const:x0)");
    simulate->add_option("--x0", sim.x0, "x(0)")->capture_default_str();
    simulate->add_option("--v0", sim.v0, "x'(0)")->capture_default_str();
    simulate->add_option("--out", sim.out, "output CSV (stdout when omitted)");

    SystemFlags det_sys;
    DetectFlags det;
    DetectOptions det_opts;
    auto* detect = app.add_subcommand("detect-hopf", "bisect the stability boundary of the origin in T");
    det_sys.attach(detect);
    detect->add_option("--k", det.k, "feedback gain")->required();
    detect->add_option("--t-lo", det.t_lo, "bracket start")->required();
    detect->add_option("--t-hi", det.t_hi, "bracket end")->required();
    detect->add_option("--append", det.append, "append the point to a curve CSV");
    attach_detect(detect, det_opts);

    SystemFlags cmp_sys;
    RangeFlags cmp_range;
    DetectOptions cmp_detect;
    std::string reference = "exact";
    auto* compare = app.add_subcommand("compare", "pointwise T errors against a reference curve");
    cmp_sys.attach(compare);
    cmp_range.attach(compare, {"approach1", "approach2"});
    compare->add_option("--reference", reference, "reference method")->capture_default_str();
    attach_detect(compare, cmp_detect);

    std::vector<std::string> argv_tail(args.rbegin(), args.rend());
    try {
        app.parse(std::move(argv_tail));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    try {
        if (*curves) return cmd_hopf_curves(curves_sys, curves_range, curves_detect, out, err);
        if (*simulate) return cmd_simulate(sim_sys, sim, out, err);
        if (*detect) return cmd_detect_hopf(det_sys, det, det_opts, out, err);
        if (*compare) return cmd_compare(cmp_sys, cmp_range, reference, cmp_detect, out, err);
    } catch (const InvalidArgument& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}

}  // namespace hopfdelay::cli
