#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rtheta/planners.hpp"
#include "rtheta/simulate.hpp"
#include "test_helpers.hpp"

using namespace rtheta;
using namespace rtheta::testing;

TEST_CASE("STA schedule endpoints carry the closed-form gravity loads") {
    const SystemParams p = nominal_params();
    const PolynomialProfile prof{PolyOrder::quintic, nominal_start(), nominal_goal(), 4.0};
    const Protocol proto = sta_inputs(p, prof, 4001);
    CHECK(proto.label == ProtocolLabel::sta_quintic);
    CHECK(proto.t_f == 4.0);
    CHECK(close_rel(proto.schedule.tau.front(), kTauStart, 1e-10));
    CHECK(std::abs(proto.schedule.f.front()) < 1e-10);
    CHECK(close_rel(proto.schedule.tau.back(), kTauGoal, 1e-10));
    CHECK(close_rel(proto.schedule.f.back(), kForceGoal, 1e-10));

    SUBCASE("reversed transfer swaps the endpoint roles") {
        const PolynomialProfile rev{PolyOrder::quintic, nominal_goal(), nominal_start(), 4.0};
        const Protocol back = sta_inputs(p, rev, 501);
        CHECK(close_rel(back.schedule.tau.front(), kTauGoal, 1e-10));
        CHECK(close_rel(back.schedule.tau.back(), kTauStart, 1e-10));
        CHECK(close_rel(back.schedule.f.front(), kForceGoal, 1e-10));
        CHECK(std::abs(back.schedule.f.back()) < 1e-10);
    }
}

TEST_CASE("STA protocols reach the goal when integrated") {
    const SystemParams p = nominal_params();
    const SimConfig cfg{1e-3, 0};
    for (auto [order, tf] : {std::pair{PolyOrder::quintic, 4.0},
                             std::pair{PolyOrder::seventh, 2.535}}) {
        const PolynomialProfile prof{order, nominal_start(), nominal_goal(), tf};
        const Protocol proto = sta_inputs(p, prof, 4001);
        const TrajectoryRecord rec = integrate(p, nominal_start_state(), proto.schedule, cfg);
        const State xf = rec.final_state();
        CHECK(std::abs(xf.theta - M_PI / 4.0) < 1e-4);
        CHECK(std::abs(xf.r - 4.0) < 1e-4);
        CHECK(std::abs(xf.dtheta) < 1e-5);
        CHECK(std::abs(xf.dr) < 1e-5);
        CHECK(kinetic_energy(p, xf) < 1e-6);
        CHECK(rec.final_energy() == doctest::Approx(kGoalEnergy).epsilon(1e-4));
    }
}

namespace {

// independent peak probe straight from the reference trajectory
bool peaks_within(const SystemParams& p, PolyOrder order, double tf,
                  const ActuatorBounds& b) {
    const PolynomialProfile prof{order, nominal_start(), nominal_goal(), tf};
    for (int i = 0; i <= 4000; ++i) {
        const GenInput u = inverse_dynamics(p, prof.eval(tf * i / 4000.0));
        if (std::abs(u.tau) > b.tau_max || std::abs(u.f) > b.f_max) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("minimum feasible durations under the actuator bounds") {
    const SystemParams p = nominal_params();
    const ActuatorBounds bounds{600.0, 150.0};

    const double tf5 =
        min_feasible_tf(p, PolyOrder::quintic, nominal_start(), nominal_goal(), bounds, 1e-3);
    CHECK(tf5 == doctest::Approx(3.615).epsilon(0.05 / 3.615));

    const double tf7 =
        min_feasible_tf(p, PolyOrder::seventh, nominal_start(), nominal_goal(), bounds, 1e-3);
    CHECK(tf7 == doctest::Approx(2.535).epsilon(0.05 / 2.535));

    SUBCASE("bracketing certificate") {
        for (auto [order, tf] : {std::pair{PolyOrder::quintic, tf5},
                                 std::pair{PolyOrder::seventh, tf7}}) {
            CHECK(peaks_within(p, order, tf, bounds));
            CHECK_FALSE(peaks_within(p, order, tf - 1e-3, bounds));
        }
    }
    SUBCASE("peaks stay inside the bounds at 1.5x the minimum") {
        CHECK(peaks_within(p, PolyOrder::quintic, 1.5 * tf5, bounds));
        CHECK(peaks_within(p, PolyOrder::seventh, 1.5 * tf7, bounds));
    }
    SUBCASE("unbounded actuators return the bracket floor") {
        const double tf = min_feasible_tf(p, PolyOrder::quintic, nominal_start(),
                                          nominal_goal(), ActuatorBounds{1e9, 1e9}, 1e-3);
        CHECK(tf == 0.5);
    }
    SUBCASE("statically infeasible endpoints are rejected") {
        CHECK_THROWS_AS(min_feasible_tf(p, PolyOrder::quintic, nominal_start(),
                                        nominal_goal(), ActuatorBounds{100.0, 150.0}, 1e-3),
                        InfeasibleError);
    }
}

TEST_CASE("constraint-limited protocol") {
    const SystemParams p = nominal_params();
    const KinematicBounds kb;

    SUBCASE("duration and pointwise kinematic bounds") {
        const Protocol proto =
            constraint_limited_protocol(p, nominal_start(), nominal_goal(), kb);
        CHECK(proto.t_f > 3.20);
        CHECK(proto.t_f < 3.45);
        CHECK(proto.t_f == doctest::Approx(3.2968287418).epsilon(1e-9));
        for (int i = 0; i <= 3000; ++i) {
            const KinPoint k = proto.reference(proto.t_f * i / 3000.0);
            CHECK(std::abs(k.dq.theta) <= kb.dtheta_max * (1.0 + 1e-12));
            CHECK(std::abs(k.ddq.theta) <= kb.ddtheta_max * (1.0 + 1e-12));
            CHECK(std::abs(k.dq.r) <= kb.dr_max * (1.0 + 1e-12));
            CHECK(std::abs(k.ddq.r) <= kb.ddr_max * (1.0 + 1e-12));
        }
        const TrajectoryRecord rec =
            integrate(p, nominal_start_state(), proto.schedule, SimConfig{1e-3, 0});
        const State xf = rec.final_state();
        CHECK(std::abs(xf.theta - M_PI / 4.0) < 1e-3);
        CHECK(std::abs(xf.r - 4.0) < 1e-3);
    }
    SUBCASE("radial-only transfer leaves only the gravity torque") {
        const Coord q0{0.3, 1.0}, qf{0.3, 2.0};
        const Protocol proto = constraint_limited_protocol(p, q0, qf, kb, 501);
        for (std::size_t i = 0; i < proto.schedule.times.size(); ++i) {
            const KinPoint k = proto.reference(proto.schedule.times[i]);
            const double expect = p.m * p.g * k.q.r * std::cos(0.3);
            CHECK(close_rel(proto.schedule.tau[i], expect, 1e-12));
        }
    }
    SUBCASE("zero displacement collapses to a zero-duration hold") {
        const Coord q{0.2, 1.5};
        const Protocol proto = constraint_limited_protocol(p, q, q, kb);
        CHECK(proto.t_f == 0.0);
        CHECK(proto.schedule.times.size() == 1);
        const GenInput hold = gravity_vector(p, q);
        CHECK(proto.schedule.tau[0] == hold.tau);
        CHECK(proto.schedule.f[0] == hold.f);
    }
}
