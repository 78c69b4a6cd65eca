#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "rtheta/robustness.hpp"
#include "test_helpers.hpp"

using namespace rtheta;
using namespace rtheta::testing;

namespace {

Protocol seventh_protocol(const SystemParams& p, int samples = 2001) {
    const PolynomialProfile prof{PolyOrder::seventh, nominal_start(), nominal_goal(), 2.535};
    return sta_inputs(p, prof, samples);
}

}  // namespace

TEST_CASE("relative energy error metric") {
    CHECK(re_metric(554.372, 554.372) == 0.0);
    CHECK(re_metric(554.372, 560.0) ==
          doctest::Approx(std::abs((560.0 - 554.372) / 554.372)).epsilon(1e-15));
    CHECK(re_metric(554.372, 560.0) == doctest::Approx(0.010153).epsilon(1e-4));
    CHECK(re_metric(100.0, 90.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK_THROWS_AS(re_metric(0.0, 1.0), std::domain_error);
}

TEST_CASE("grid spec validation and layout") {
    GridSpec bad;
    bad.n_theta = 4;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.n_theta = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    const GridSpec g{0.1, 3, 0.2, 5};
    g.validate();
    CHECK(g.cells() == 15);
    CHECK(g.offset(0).first == doctest::Approx(-0.1));
    CHECK(g.offset(7).first == doctest::Approx(0.0));   // center cell
    CHECK(g.offset(7).second == doctest::Approx(0.0));
    CHECK(g.offset(14).second == doctest::Approx(0.2));
}

TEST_CASE("initial-error grid for the open-loop reference protocol") {
    const SystemParams p = nominal_params();
    const Protocol proto = seventh_protocol(p);
    const SimConfig cfg{1e-3, 0};
    const Runner runner = [&](const State& x0) {
        return integrate(p, x0, proto.schedule, cfg);
    };
    const GridSpec grid{M_PI / 1800.0, 5, 0.01, 5};
    const RobustnessReport rep = initial_error_grid(runner, nominal_start_state(), grid,
                                                    to_string(proto.label), 0);

    SUBCASE("zero-error cell is exact and the MRE is the mean of RE") {
        const std::size_t center = 12;  // (2,2) in a 5x5 grid
        CHECK(rep.cells[center].input0 == 0.0);
        CHECK(rep.cells[center].re < 1e-8);
        double sum = 0.0;
        for (const auto& c : rep.cells) sum += c.re;
        CHECK(rep.mre == doctest::Approx(sum / rep.cells.size()).epsilon(1e-15));
        CHECK(rep.aborted.empty());
        CHECK(rep.mre > 0.0);
    }
    SUBCASE("replay is bit-identical") {
        const RobustnessReport again = initial_error_grid(runner, nominal_start_state(),
                                                          grid, to_string(proto.label), 2);
        REQUIRE(again.cells.size() == rep.cells.size());
        for (std::size_t i = 0; i < rep.cells.size(); ++i) {
            CHECK(rep.cells[i].re == again.cells[i].re);
            CHECK(rep.cells[i].theta_f == again.cells[i].theta_f);
        }
        CHECK(rep.mre == again.mre);
    }
    SUBCASE("grid refinement changes the MRE only mildly") {
        const GridSpec fine{M_PI / 1800.0, 9, 0.01, 9};
        const RobustnessReport rep2 = initial_error_grid(runner, nominal_start_state(),
                                                         fine, to_string(proto.label), 0);
        CHECK(std::abs(rep2.mre - rep.mre) < 0.2 * rep.mre);
    }
}

TEST_CASE("input-noise trials") {
    const SystemParams p = nominal_params();
    const Protocol proto = seventh_protocol(p, 1001);
    const SimConfig cfg{1e-3, 0};

    SUBCASE("zero noise reproduces the nominal run") {
        const RobustnessReport rep = input_noise_trials(
            p, proto, 100, input_noise(0.0, 0.0), 11, cfg, nominal_start_state(), 0);
        for (const auto& c : rep.cells) CHECK(c.re < 1e-8);
    }
    SUBCASE("trial count below 100 is rejected") {
        CHECK_THROWS_AS(input_noise_trials(p, proto, 10, input_noise(30.0, 10.0), 11, cfg,
                                           nominal_start_state(), 0),
                        std::invalid_argument);
    }
    SUBCASE("derived seeds give reproducible, trial-distinct results") {
        const NoiseSpec spec = input_noise(30.0, 10.0);
        const RobustnessReport a =
            input_noise_trials(p, proto, 120, spec, 21, cfg, nominal_start_state(), 0);
        const RobustnessReport b =
            input_noise_trials(p, proto, 120, spec, 21, cfg, nominal_start_state(), 2);
        for (std::size_t i = 0; i < a.cells.size(); ++i) CHECK(a.cells[i].re == b.cells[i].re);
        CHECK(a.mre > 0.0);
        bool distinct = false;
        for (std::size_t i = 1; i < a.cells.size(); ++i)
            distinct = distinct || (a.cells[i].re != a.cells[0].re);
        CHECK(distinct);
    }
}

TEST_CASE("dissipation scan") {
    const SystemParams p = nominal_params();
    const PolynomialProfile prof{PolyOrder::quintic, nominal_start(), nominal_goal(), 4.0};

    SUBCASE("mismatched mode vanishes at the design point") {
        const ScanResult scan =
            dissipation_scan(p, prof, 0.0, 200.0, 5, 0.0, 200.0, 5, ScanMode::mismatched, 1e-3);
        // design point (B1=100, B2=50) lies on the 5x5 grid: index (2,1)
        CHECK(scan.b1[2] == 100.0);
        CHECK(scan.b2[1] == 50.0);
        CHECK(scan.re[2 * 5 + 1] < 1e-8);
        // off-design damping produces a real error
        CHECK(scan.re[0] > scan.re[2 * 5 + 1]);
    }
    SUBCASE("matched mode leaves only the integration residual") {
        const ScanResult scan =
            dissipation_scan(p, prof, 0.0, 200.0, 5, 0.0, 200.0, 5, ScanMode::matched, 1e-4);
        for (double re : scan.re) CHECK(re < 1e-6);
    }
    SUBCASE("coarse-step residual decreases with stronger damping") {
        const ScanResult scan =
            dissipation_scan(p, prof, 0.0, 200.0, 5, 0.0, 200.0, 5, ScanMode::matched, 0.02);
        CHECK(scan.re.front() >= scan.re.back());  // (0,0) vs (200,200)
    }
}
