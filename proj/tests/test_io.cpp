#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rtheta/io.hpp"
#include "rtheta/util.hpp"
#include "test_helpers.hpp"

using namespace rtheta;
using namespace rtheta::testing;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/rtheta_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("trajectory CSV carries the exact header and provenance") {
    const SystemParams p = nominal_params();
    const PolynomialProfile prof{PolyOrder::quintic, nominal_start(), nominal_goal(), 4.0};
    const Protocol proto = sta_inputs(p, prof, 501);
    const TrajectoryRecord rec =
        integrate(p, nominal_start_state(), proto.schedule, SimConfig{1e-2, 0});

    TempFile tmp("traj.csv");
    const Provenance prov("test-config");
    write_trajectory_csv(tmp.path, rec, prov);
    const std::string text = slurp(tmp.path);
    CHECK(text.rfind("t,theta,r,dtheta,dr,tau,f,E\n", 0) == 0);
    CHECK(text.find("# config_hash=" + prov.config_hash) != std::string::npos);
    // first data row starts from the rest configuration with the gravity torque
    std::istringstream lines(text);
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    CHECK(first.rfind("0,0,1,0,0,196,", 0) == 0);
}

TEST_CASE("protocol JSON round trip") {
    const SystemParams p = nominal_params();
    const PolynomialProfile prof{PolyOrder::seventh, nominal_start(), nominal_goal(), 2.535};
    const Protocol proto = sta_inputs(p, prof, 801);
    const nlohmann::json j =
        protocol_to_json(proto, p, ActuatorBounds{600.0, 150.0}, Provenance{});
    CHECK(j.at("schema") == "protocol-v1");
    CHECK(j.at("label") == "sta_seventh");
    CHECK(j.at("metadata").at("bounds").at("tau_max") == 600.0);

    const Protocol back = protocol_from_json(j);
    CHECK(back.label == ProtocolLabel::sta_seventh);
    CHECK(back.t_f == proto.t_f);
    REQUIRE(back.schedule.times.size() == proto.schedule.times.size());
    for (std::size_t i = 0; i < proto.schedule.times.size(); ++i) {
        CHECK(back.schedule.tau[i] == proto.schedule.tau[i]);
        CHECK(back.schedule.f[i] == proto.schedule.f[i]);
    }

    nlohmann::json bad = j;
    bad["schema"] = "protocol-v0";
    CHECK_THROWS_AS(protocol_from_json(bad), std::invalid_argument);
}

TEST_CASE("robustness report serialization") {
    RobustnessReport rep;
    rep.label = "sta_seventh";
    rep.kind = "grid";
    rep.cells = {CellResult{-0.001, -0.01, 0.03, 0.78, 3.99, false},
                 CellResult{0.0, 0.0, 0.0, M_PI / 4.0, 4.0, false}};
    rep.mre = 0.015;
    rep.nominal_energy = 554.37;

    const nlohmann::json j = report_to_json(rep, Provenance{});
    CHECK(j.at("MRE") == 0.015);
    CHECK(j.at("cells").size() == 2);
    CHECK(j.at("cells")[0].at("RE") == 0.03);

    TempFile tmp("grid.csv");
    write_report_csv(tmp.path, rep, Provenance{});
    const std::string text = slurp(tmp.path);
    CHECK(text.rfind("d_theta,d_r,RE\n", 0) == 0);

    rep.kind = "trials";
    TempFile tmp2("trials.csv");
    write_report_csv(tmp2.path, rep, Provenance{});
    CHECK(slurp(tmp2.path).rfind("trial,RE,theta_f,r_f\n", 0) == 0);
}

TEST_CASE("config hash is stable and content-sensitive") {
    const Provenance a("config-a");
    const Provenance b("config-a");
    const Provenance c("config-b");
    CHECK(a.config_hash == b.config_hash);
    CHECK(a.config_hash != c.config_hash);
    CHECK(a.version == std::string(kArtifactVersion));
}
