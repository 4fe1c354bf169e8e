#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hopfdelay/slowflow.hpp"

using namespace hopfdelay;

namespace {

// Chain rule: dR = (A dA + B dB) / R, dtheta = (A dB - B dA) / R^2.
Vec2<double> polar_from_cartesian(const SystemSpec& spec, double delay, const PolarState& now,
                                  const PolarState& delayed) {
    const PlaneState a{now.R * std::cos(now.theta), now.R * std::sin(now.theta)};
    const PlaneState d{delayed.R * std::cos(delayed.theta), delayed.R * std::sin(delayed.theta)};
    const Vec2<double> c = cartesian_rhs(spec, delay, a, d);
    const double r2 = a.A * a.A + a.B * a.B;
    return {(a.A * c(0) + a.B * c(1)) / now.R, (a.A * c(1) - a.B * c(0)) / r2};
}

}  // namespace

TEST_CASE("cartesian slow flow at fixed points") {
    const SystemSpec duff{SystemKind::Duffing, 0.1, 0.05, 1.0, 1.0};
    const Vec2<double> zero = cartesian_rhs(duff, 1.3, PlaneState{}, PlaneState{});
    CHECK(zero(0) == 0.0);
    CHECK(zero(1) == 0.0);

    const SystemSpec vdp{SystemKind::VanDerPol, 0.1, 0.0, 0.0, 0.0};
    const Vec2<double> cycle = cartesian_rhs(vdp, 0.7, PlaneState{2.0, 0.0}, PlaneState{2.0, 0.0});
    CHECK(cycle(0) == doctest::Approx(0.0));
    CHECK(cycle(1) == doctest::Approx(0.0));
}

TEST_CASE("Duffing cartesian hand evaluation at T = pi/2") {
    const SystemSpec duff{SystemKind::Duffing, 0.1, 0.05, 1.0, 1.0};
    const PlaneState s{1.0, 0.0};
    const Vec2<double> d = cartesian_rhs(duff, std::numbers::pi / 2, s, s);
    CHECK(d(0) == doctest::Approx(-0.525).epsilon(1e-14));
    CHECK(d(1) == doctest::Approx(-0.375).epsilon(1e-14));
}

TEST_CASE("polar slow flow hand evaluations") {
    const SystemSpec undelayed{SystemKind::Duffing, 0.1, 0.05, 1.0, 0.0};
    CHECK(polar_rhs(undelayed, 1.0, PolarState{1.0, 0.0}, PolarState{1.0, 0.0})(0) == doctest::Approx(-0.025));

    const SystemSpec duff{SystemKind::Duffing, 0.1, 0.05, 1.0, 1.0};
    for (const double theta : {0.0, 1.0, -2.5}) {
        const PolarState s{1.0, theta};
        CHECK(polar_rhs(duff, std::numbers::pi, s, s)(0) == doctest::Approx(-0.025).epsilon(1e-12));
    }
}

TEST_CASE("polar slow flow refuses R near zero") {
    const SystemSpec vdp{SystemKind::VanDerPol, 0.1, 0.0, 0.0, 2.0};
    CHECK_THROWS_AS(polar_rhs(vdp, 1.0, PolarState{1e-9, 0.0}, PolarState{1.0, 0.0}), PolarSingularityError);
}

TEST_CASE("linearized slow flow hand evaluation and linearity") {
    const SystemSpec vdp{SystemKind::VanDerPol, 0.1, 0.0, 0.0, 2.0};
    const PlaneState s{1.0, 0.0};
    const Vec2<double> d = linearized_cartesian_rhs(vdp, std::numbers::pi / 6, s, s);
    CHECK(std::abs(d(0)) < 1e-15);
    CHECK(d(1) == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-14));

    const Vec2<double> zero = linearized_cartesian_rhs(vdp, 0.4, PlaneState{}, PlaneState{});
    CHECK(zero.isZero(0.0));

    std::mt19937 rng(19);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (const SystemKind kind : {SystemKind::Duffing, SystemKind::VanDerPol, SystemKind::ErneuxGrasman}) {
        const SystemSpec spec{kind, 0.2, 0.05, 1.0, 1.5};
        for (int i = 0; i < 50; ++i) {
            const Vec2<double> now(u(rng), u(rng));
            const Vec2<double> lag(u(rng), u(rng));
            const double delay = 3.0 + u(rng);
            const Vec2<double> one = linearized_cartesian_rhs(spec, delay, now, lag);
            const Vec2<double> two = linearized_cartesian_rhs<double>(spec, delay, 2.0 * now, 2.0 * lag);
            CHECK(two == 2.0 * one);
        }
    }
}

TEST_CASE("gamma never enters the linearized slow flow") {
    SystemSpec a{SystemKind::Duffing, 0.2, 0.05, 1.0, 1.5};
    SystemSpec b = a;
    b.gamma = 17.0;
    const Vec2<double> now(0.3, -0.8);
    const Vec2<double> lag(1.1, 0.2);
    CHECK(linearized_cartesian_rhs<double>(a, 2.0, now, lag) == linearized_cartesian_rhs<double>(b, 2.0, now, lag));
}

TEST_CASE("Duffing slow flow is odd") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const SystemSpec duff{SystemKind::Duffing, 0.2, 0.05, 1.0, 1.5};
    for (int i = 0; i < 100; ++i) {
        const Vec2<double> now(u(rng), u(rng));
        const Vec2<double> lag(u(rng), u(rng));
        const double delay = 3.0 + u(rng);
        CHECK(cartesian_rhs<double>(duff, delay, -now, -lag) == -cartesian_rhs<double>(duff, delay, now, lag));
    }
}

TEST_CASE("polar and cartesian forms agree on random states") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> radius(0.01, 3.0);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> gain(0.0, 3.0);
    std::uniform_real_distribution<double> delay(0.0, 10.0);
    const SystemKind kinds[] = {SystemKind::Duffing, SystemKind::VanDerPol, SystemKind::ErneuxGrasman};

    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const SystemSpec spec{kinds[i % 3], 0.1, 0.05, 1.0, gain(rng)};
        const PolarState now{radius(rng), angle(rng)};
        const PolarState lag{radius(rng), angle(rng)};
        const double t = delay(rng);
        const Vec2<double> polar = polar_rhs(spec, t, now, lag);
        const Vec2<double> chained = polar_from_cartesian(spec, t, now, lag);
        worst = std::max(worst, (polar - chained).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("undelayed slow flow is the cartesian flow with equal arguments") {
    const SystemSpec vdp{SystemKind::VanDerPol, 0.1, 0.0, 0.0, 2.0};
    const Vec2<double> s(0.4, -0.9);
    const Vec2<double> lin = linearized_cartesian_rhs<double>(vdp, 0.8, s, s);
    // A' = (1/2 - (k/2) sin T) A - (k/2) cos T B, B' = (k/2) cos T A + (1/2 - (k/2) sin T) B
    const double diag = 0.5 - std::sin(0.8);
    const double off = std::cos(0.8);
    CHECK(lin(0) == doctest::Approx(diag * s(0) - off * s(1)).epsilon(1e-14));
    CHECK(lin(1) == doctest::Approx(off * s(0) + diag * s(1)).epsilon(1e-14));
}

TEST_CASE("averaging the Duffing cubic gives a -3/8 frequency drift") {
    // Variation of parameters with x = R cos(phi), phi = t + theta, forcing
    // f = -gamma x^3: dtheta/deta is the cycle average of f cos(phi) / R.
    const double gamma = 1.0;
    const double radius = 1.3;
    const int n = 20000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double phase = 2.0 * std::numbers::pi * (i + 0.5) / n;
        const double x = radius * std::cos(phase);
        sum += -gamma * x * x * x * std::cos(phase) / radius;
    }
    const double drift = sum / n;
    CHECK(drift == doctest::Approx(-3.0 * gamma * radius * radius / 8.0).epsilon(1e-9));

    const SystemSpec duff{SystemKind::Duffing, 0.1, 0.0, gamma, 0.0};
    const PolarState s{radius, 0.4};
    CHECK(polar_rhs(duff, 1.0, s, s)(1) == doctest::Approx(drift).epsilon(1e-9));
}
