#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rtheta/errors.hpp"
#include "rtheta/rng.hpp"
#include "rtheta/trajectories.hpp"
#include "test_helpers.hpp"

using namespace rtheta;
using namespace rtheta::testing;

TEST_CASE("shape functions satisfy the six endpoint conditions exactly") {
    for (PolyOrder order : {PolyOrder::quintic, PolyOrder::seventh}) {
        const ShapeVals a = shape_eval(order, 0.0);
        CHECK(a.sigma == 0.0);
        CHECK(a.dsigma == 0.0);
        CHECK(a.ddsigma == 0.0);
        const ShapeVals b = shape_eval(order, 1.0);
        CHECK(b.sigma == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(close(b.dsigma, 0.0, 1e-12));
        CHECK(close(b.ddsigma, 0.0, 1e-12));
    }
}

TEST_CASE("quintic interior values") {
    const ShapeVals m = shape_eval(PolyOrder::quintic, 0.5);
    CHECK(m.sigma == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.dsigma == doctest::Approx(1.875).epsilon(1e-15));
}

TEST_CASE("quintic is strictly increasing on (0,1)") {
    double prev = 0.0;
    for (int i = 1; i < 10000; ++i) {
        const double s = static_cast<double>(i) / 10000.0;
        const ShapeVals v = shape_eval(PolyOrder::quintic, s);
        CHECK(v.sigma > prev);
        prev = v.sigma;
    }
}

TEST_CASE("shape_eval rejects s outside [0,1]") {
    CHECK_THROWS_AS(shape_eval(PolyOrder::quintic, -0.01), std::domain_error);
    CHECK_THROWS_AS(shape_eval(PolyOrder::seventh, 1.01), std::domain_error);
}

TEST_CASE("polynomial profile on the reference transfer") {
    const PolynomialProfile prof{PolyOrder::quintic, nominal_start(), nominal_goal(), 4.0};

    SUBCASE("rest endpoints") {
        const KinPoint k0 = prof.eval(0.0);
        CHECK(k0.q.theta == 0.0);
        CHECK(k0.q.r == 1.0);
        CHECK(k0.dq.theta == 0.0);
        CHECK(k0.ddq.r == 0.0);
        const KinPoint kf = prof.eval(4.0);
        CHECK(kf.q.r == doctest::Approx(4.0).epsilon(1e-15));
        CHECK(close(kf.dq.r, 0.0, 1e-12));
    }
    SUBCASE("midpoint values") {
        const KinPoint k = prof.eval(2.0);
        CHECK(k.q.r == doctest::Approx(2.5).epsilon(1e-15));
        CHECK(k.dq.r == doctest::Approx(3.0 * 1.875 / 4.0).epsilon(1e-15));
    }
    SUBCASE("peak radial acceleration matches the analytic maximizer") {
        // maximize 60 d (2s^3 - 3s^2 + s)/t_f^2; stationary at s = (3-sqrt(3))/6
        const double s_star = (3.0 - std::sqrt(3.0)) / 6.0;
        const double expect =
            60.0 * 3.0 * (2.0 * s_star * s_star * s_star - 3.0 * s_star * s_star + s_star) /
            16.0;
        double peak = 0.0;
        for (int i = 0; i <= 40000; ++i) {
            const double t = 4.0 * i / 40000.0;
            peak = std::max(peak, std::abs(prof.eval(t).ddq.r));
        }
        CHECK(peak == doctest::Approx(expect).epsilon(1e-6));
        CHECK(expect == doctest::Approx(1.0824).epsilon(1e-4));
    }
    SUBCASE("out-of-range times are rejected") {
        CHECK_THROWS_AS(prof.eval(-0.1), std::domain_error);
        CHECK_THROWS_AS(prof.eval(4.1), std::domain_error);
    }
}

TEST_CASE("profile derivatives agree with central differences") {
    for (PolyOrder order : {PolyOrder::quintic, PolyOrder::seventh}) {
        const PolynomialProfile prof{order, nominal_start(), nominal_goal(), 2.535};
        const double h = 1e-5 * prof.t_f;
        for (std::uint64_t i = 0; i < 200; ++i) {
            const double t = h + (prof.t_f - 2.0 * h) * rng::uniform01(3, i);
            const KinPoint km = prof.eval(t - h);
            const KinPoint k0 = prof.eval(t);
            const KinPoint kp = prof.eval(t + h);
            const double v_fd = (kp.q.r - km.q.r) / (2.0 * h);
            const double a_fd = (kp.dq.r - km.dq.r) / (2.0 * h);
            if (std::abs(k0.dq.r) > 1e-3) CHECK(close_rel(v_fd, k0.dq.r, 1e-6));
            if (std::abs(k0.ddq.r) > 1e-3) CHECK(close_rel(a_fd, k0.ddq.r, 1e-6));
        }
    }
}

TEST_CASE("trapezoid minimum-time construction") {
    SUBCASE("radial coordinate of the reference transfer") {
        const TrapezoidProfile p = trapezoid_min_time(3.0, 1.5, 1.2);
        CHECK(p.t_acc == doctest::Approx(1.25).epsilon(1e-15));
        CHECK(p.t_dec == doctest::Approx(1.25).epsilon(1e-15));
        CHECK(p.t_coast == doctest::Approx(0.75).epsilon(1e-14));
        CHECK(p.total_time() == doctest::Approx(3.25).epsilon(1e-14));
    }
    SUBCASE("angular coordinate of the reference transfer") {
        const TrapezoidProfile p = trapezoid_min_time(M_PI / 4.0, 0.4, 0.3);
        CHECK(p.total_time() == doctest::Approx(3.2968287418).epsilon(1e-9));
    }
    SUBCASE("short move degenerates to a triangle") {
        const TrapezoidProfile p = trapezoid_min_time(0.1, 1.5, 1.2);
        CHECK(p.t_coast == 0.0);
        CHECK(p.v_coast == doctest::Approx(std::sqrt(0.12)).epsilon(1e-14));
        CHECK(p.v_coast < 1.5);
    }
    SUBCASE("zero displacement gives a zero-duration profile") {
        const TrapezoidProfile p = trapezoid_min_time(0.0, 1.5, 1.2);
        CHECK(p.total_time() == 0.0);
    }
}

TEST_CASE("trapezoid displacement and bounds hold pointwise") {
    for (double d : {3.0, -3.0, 0.1, M_PI / 4.0, -0.02}) {
        const double v_max = 1.5, a_max = 1.2;
        const TrapezoidProfile p = trapezoid_min_time(d, v_max, a_max);
        double x, v, a;
        p.eval(p.total_time(), x, v, a);
        CHECK(close_rel(x, d, 1e-12));
        CHECK(v == 0.0);
        for (int i = 0; i <= 2000; ++i) {
            const double t = p.total_time() * i / 2000.0;
            p.eval(t, x, v, a);
            CHECK(std::abs(v) <= v_max * (1.0 + 1e-12));
            CHECK(std::abs(a) <= a_max * (1.0 + 1e-12));
        }
    }
}

namespace {

// independent route: solve T(v) = 2 v/a + (|d| - v^2/a)/v = T_target by bisection
double coast_speed_by_bisection(double d, double a, double t_target, double v_hi) {
    auto total = [&](double v) { return 2.0 * v / a + (std::abs(d) - v * v / a) / v; };
    double lo = 1e-9, hi = v_hi;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (total(mid) > t_target)
            lo = mid;  // slower coast -> longer duration
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("arrival synchronization by coast-speed reduction") {
    const TrapezoidProfile angular = trapezoid_min_time(M_PI / 4.0, 0.4, 0.3);
    const TrapezoidProfile radial = trapezoid_min_time(3.0, 1.5, 1.2);

    SUBCASE("stretched radial profile matches the bisection oracle") {
        const double target = angular.total_time();
        const TrapezoidProfile sync = synchronize_profiles(angular, radial);
        CHECK(close(sync.total_time(), target, 1e-9));
        const double v_oracle = coast_speed_by_bisection(3.0, 1.2, target, radial.v_coast);
        CHECK(sync.v_coast == doctest::Approx(v_oracle).epsilon(1e-8));
        CHECK(sync.v_coast <= radial.v_coast);
        CHECK(sync.a == radial.a);
        double x, v, a;
        sync.eval(sync.total_time(), x, v, a);
        CHECK(close_rel(x, 3.0, 1e-12));
    }
    SUBCASE("angular profile stretched to 3.364 s keeps its displacement") {
        const TrapezoidProfile s = stretch_to_duration(angular, 3.364);
        CHECK(close(s.total_time(), 3.364, 1e-9));
        CHECK(s.v_coast > 0.0);
        CHECK(s.v_coast <= 0.4);
        double x, v, a;
        s.eval(s.total_time(), x, v, a);
        CHECK(close_rel(x, M_PI / 4.0, 1e-12));
    }
    SUBCASE("identity when the target equals the own duration") {
        const TrapezoidProfile same = stretch_to_duration(radial, radial.total_time());
        CHECK(same.v_coast == radial.v_coast);
        CHECK(same.t_coast == radial.t_coast);
    }
    SUBCASE("shorter target is infeasible") {
        CHECK_THROWS_AS(stretch_to_duration(radial, 3.0), InfeasibleError);
        CHECK_THROWS_AS(synchronize_profiles(radial, angular), InfeasibleError);
    }
}
