#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/LU>

#include "hopfdelay/charsolve.hpp"

using namespace hopfdelay;

namespace {

SystemSpec duffing(double eps, double alpha, double k) { return {SystemKind::Duffing, eps, alpha, 1.0, k}; }
SystemSpec vdp(double eps, double k) { return {SystemKind::VanDerPol, eps, 0.0, 0.0, k}; }
SystemSpec erneux(double eps, double k) { return {SystemKind::ErneuxGrasman, eps, 0.0, 0.0, k}; }

// det(M(lambda)) for the delayed linear slow flow, built as a 2x2 complex matrix.
template <typename Scalar>
std::complex<Scalar> slow_determinant(const SystemSpec& spec, Scalar omega, Scalar delay) {
    using Complex = std::complex<Scalar>;
    const auto lin = linear_slow_terms<Scalar>(spec);
    const Scalar half_k = static_cast<Scalar>(spec.k) / Scalar(2);
    const Complex lambda(Scalar(0), omega);
    const Complex e = std::exp(-lambda * static_cast<Scalar>(spec.epsilon) * delay);
    const Complex a = lin.growth - half_k * e * std::sin(delay) - lambda;
    const Complex b = -lin.rotation - half_k * e * std::cos(delay);
    Eigen::Matrix<Complex, 2, 2> m;
    m << a, b, -b, a;
    return m.determinant();
}

}  // namespace

TEST_CASE("expanded slow-flow residual equals the complex determinant") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> w(0.05, 2.0);
    std::uniform_real_distribution<double> t(0.0, 9.0);
    std::uniform_real_distribution<double> k(0.2, 3.0);
    for (const SystemKind kind : {SystemKind::Duffing, SystemKind::VanDerPol, SystemKind::ErneuxGrasman}) {
        for (int i = 0; i < 200; ++i) {
            const SystemSpec spec{kind, 0.3, 0.05, 1.0, k(rng)};
            const double omega = w(rng);
            const double delay = t(rng);
            const double scale = slowflow_residual_scale(kind);
            const auto r = slowflow_char_residual(spec, omega, delay);
            const auto det = scale * slow_determinant<double>(spec, omega, delay);
            CHECK(std::abs(r.re - det.real()) < 1e-12 * (1 + std::abs(det)));
            CHECK(std::abs(r.im - det.imag()) < 1e-12 * (1 + std::abs(det)));

            const auto rl = slowflow_char_residual<long double>(spec, omega, delay);
            const auto dl = static_cast<long double>(scale) * slow_determinant<long double>(spec, omega, delay);
            CHECK(std::abs(static_cast<double>(rl.re - dl.real())) < 1e-15 * (1 + std::abs(det)));
            CHECK(std::abs(static_cast<double>(rl.im - dl.imag())) < 1e-15 * (1 + std::abs(det)));
        }
    }
}

TEST_CASE("slow-flow residual examples") {
    // Leading order: eps = 0 formally, with a tiny eps standing in.
    const SystemSpec lead = duffing(1e-300, 0.05, 1.0);
    const double omega = std::sqrt(1.0 - 0.05 * 0.05) / 2;
    const double delay = std::numbers::pi + std::asin(0.05);
    CHECK(slowflow_char_residual(lead, omega, delay).norm() < 1e-12);

    const SystemSpec duff = duffing(0.5, 0.05, 1.0);
    const HopfPoint up = approach2_point(duff, Branch::Upper);
    CHECK(up.delay == doctest::Approx(8.3074).epsilon(1e-4));
    CHECK(slowflow_char_residual(duff, up.omega, up.delay).norm() < 1e-9);

    const SystemSpec v = vdp(0.5, 2.0);
    const HopfPoint vu = approach2_point(v, Branch::Upper);
    CHECK(slowflow_char_residual(v, vu.omega, vu.delay).norm() < 1e-9);
}

TEST_CASE("analytic Jacobians match central differences") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> w(0.1, 2.0);
    std::uniform_real_distribution<double> t(0.1, 9.0);
    const double h = 1e-6;
    for (const CharTarget target : {CharTarget::SlowFlow, CharTarget::ExactChar}) {
        for (const SystemSpec& spec : {duffing(0.3, 0.05, 1.2), vdp(0.3, 2.0), erneux(0.3, 2.0)}) {
            const ResidualFunction fn = make_residual(spec, target);
            for (int i = 0; i < 100; ++i) {
                const Vec2<double> z(w(rng), t(rng));
                const Mat2<double> j = fn(z).jacobian;
                Mat2<double> fd;
                for (int c = 0; c < 2; ++c) {
                    Vec2<double> dz = Vec2<double>::Zero();
                    dz(c) = h;
                    fd.col(c) = (fn(z + dz).residual - fn(z - dz).residual) / (2 * h);
                }
                CHECK((j - fd).norm() <= 1e-5 * std::max(1.0, fd.norm()));
            }
        }
    }
}

TEST_CASE("Newton from a root takes at most one iteration") {
    const SystemSpec spec = vdp(0.5, 2.0);
    const HopfPoint p = approach2_point(spec, Branch::Upper);
    const NewtonResult r = newton_solve(make_residual(spec, CharTarget::SlowFlow), Vec2<double>(p.omega, p.delay));
    CHECK(r.iterations <= 1);
    CHECK(r.residual_norm < 1e-10);
}

TEST_CASE("Newton from the approach I seed reaches the approach II closed form") {
    const SystemSpec spec = duffing(0.25, 0.05, 1.0);
    for (const Branch branch : {Branch::Lower, Branch::Upper}) {
        const NewtonResult r = newton_solve(make_residual(spec, CharTarget::SlowFlow),
                                            closed_form_seed(spec, branch, CharTarget::SlowFlow));
        const HopfPoint p = approach2_point(spec, branch);
        CHECK(r.delay == doctest::Approx(p.delay).epsilon(1e-9));
        CHECK(r.omega == doctest::Approx(p.omega).epsilon(1e-9));
    }
}

TEST_CASE("Newton refuses the degenerate seed") {
    const SystemSpec spec = vdp(0.1, 2.0);
    CHECK_THROWS_AS(newton_solve(make_residual(spec, CharTarget::ExactChar), Vec2<double>(0.0, 0.0)),
                    NumericalError);
    CHECK_THROWS_AS(newton_solve(make_residual(spec, CharTarget::ExactChar), Vec2<double>(NAN, 1.0)),
                    InvalidArgument);
}

TEST_CASE("slow-flow continuation reproduces the closed forms") {
    struct Case {
        SystemSpec base;
        Sweep sweep;
    };
    const Case cases[] = {
        {duffing(0.25, 0.05, 0.0), {SweepParameter::K, 0.2, 3.0, 100}},
        {vdp(0.0, 2.0), {SweepParameter::Epsilon, 0.05, 1.0, 60}},
        {vdp(0.5, 0.0), {SweepParameter::K, 1.1, 3.0, 60}},
    };
    for (const Case& c : cases) {
        for (const Branch branch : {Branch::Lower, Branch::Upper}) {
            const SweepResult res = continuation_sweep(c.base, c.sweep, branch, CharTarget::SlowFlow);
            double worst = 0.0;
            int compared = 0;
            for (const CurvePoint& cp : res.points) {
                const SystemSpec spec = with_parameter(c.base, c.sweep.parameter, cp.sweep_value);
                CHECK(slowflow_char_residual(spec, cp.point.omega, cp.point.delay).norm() < 1e-9);
                try {
                    worst = std::max(worst, std::abs(cp.point.delay - approach2_point(spec, branch).delay));
                    ++compared;
                } catch (const SeriesDivergenceError&) {
                }
            }
            CHECK(compared > 0);
            CHECK(worst < 1e-8);
        }
    }
}

TEST_CASE("exact continuation passes through the van der Pol anchors") {
    const SystemSpec base = vdp(0.1, 0.0);
    const Sweep sweep{SweepParameter::K, 1.05, 3.0, 40};
    const std::vector<double> grid = sweep_grid(sweep);
    REQUIRE(grid.size() == 40);
    for (const Branch branch : {Branch::Lower, Branch::Upper}) {
        const SweepResult res = continuation_sweep(base, sweep, branch, CharTarget::ExactChar);
        CHECK_FALSE(res.truncated);
        for (const CurvePoint& cp : res.points) {
            CHECK(exact_char_residual(with_parameter(base, SweepParameter::K, cp.sweep_value), cp.point.omega,
                                      cp.point.delay)
                      .norm() < 1e-9);
        }
    }
    const std::vector<double> at_two{2.0};
    const auto lower = continuation_sweep(base, SweepParameter::K, at_two, Branch::Lower, CharTarget::ExactChar);
    const auto upper = continuation_sweep(base, SweepParameter::K, at_two, Branch::Upper, CharTarget::ExactChar);
    CHECK(lower.points.at(0).point.delay == doctest::Approx(0.519).epsilon(0.005 / 0.519));
    CHECK(upper.points.at(0).point.delay == doctest::Approx(2.378).epsilon(0.005 / 2.378));
}

TEST_CASE("continuation stops with a warning at the end of a branch") {
    // The Duffing upper exact branch ends as eps k -> 1.
    const SweepResult res = continuation_sweep(duffing(0.5, 0.05, 0.0), Sweep{SweepParameter::K, 0.2, 3.0, 30},
                                               Branch::Upper, CharTarget::ExactChar);
    CHECK(res.truncated);
    CHECK_FALSE(res.warning.empty());
    REQUIRE_FALSE(res.points.empty());
    CHECK(res.points.back().sweep_value < 2.0);
    for (std::size_t i = 1; i < res.points.size(); ++i) {
        CHECK(res.points[i].sweep_value > res.points[i - 1].sweep_value);
    }
}

TEST_CASE("sweep grid") {
    const auto g = sweep_grid({SweepParameter::K, 1.0, 2.0, 5});
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 1.0);
    CHECK(g.back() == 2.0);
    CHECK(g[2] == doctest::Approx(1.5));
    CHECK_THROWS_AS(sweep_grid({SweepParameter::K, 1.0, 2.0, 0}), InvalidArgument);
}
