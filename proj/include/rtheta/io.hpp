#pragma once
#include <optional>
#include <string>

#include <json.hpp>

#include "rtheta/control.hpp"
#include "rtheta/planners.hpp"
#include "rtheta/robustness.hpp"
#include "rtheta/simulate.hpp"
#include "rtheta/timeopt.hpp"

namespace rtheta {

/// Embedded in every emitted file: hash of the run configuration plus the
/// artifact version.
struct Provenance {
    std::string config_hash = "0";
    std::string version;

    Provenance();
    explicit Provenance(const std::string& canonical_config);
};

/// Header is exactly `t,theta,r,dtheta,dr,tau,f,E`; decimal text with 15
/// significant digits; provenance appended as a trailing '#' comment line.
void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec,
                          const Provenance& prov, bool aborted = false);

/// Extended controller CSV with tau_cmd_preclip,f_cmd_preclip,e_theta,e_r.
void write_pid_csv(const std::string& path, const PidRecord& rec, const Provenance& prov);

nlohmann::json protocol_to_json(const Protocol& proto, const SystemParams& params,
                                const std::optional<ActuatorBounds>& bounds,
                                const Provenance& prov);
/// Round-trips the schedule, label and t_f (the reference evaluator is not
/// serialized).
Protocol protocol_from_json(const nlohmann::json& j);

/// protocol-v1 JSON for a time-optimal solution plus its diagnostics block.
nlohmann::json ocp_to_json(const OcpSolution& sol, const SystemParams& params,
                           const Provenance& prov);

nlohmann::json report_to_json(const RobustnessReport& rep, const Provenance& prov);
/// Grid reports: `d_theta,d_r,RE`; trial reports: `trial,RE,theta_f,r_f`.
void write_report_csv(const std::string& path, const RobustnessReport& rep,
                      const Provenance& prov);

nlohmann::json scan_to_json(const ScanResult& scan, const Provenance& prov);
/// Columns `B1,B2,RE`, row-major over the scan grid.
void write_scan_csv(const std::string& path, const ScanResult& scan, const Provenance& prov);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

std::string format_double(double v);

}  // namespace rtheta
