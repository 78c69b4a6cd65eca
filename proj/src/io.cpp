#include "rtheta/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "rtheta/util.hpp"

namespace rtheta {

using nlohmann::json;

Provenance::Provenance() : version(kArtifactVersion) {}

Provenance::Provenance(const std::string& canonical_config)
    : config_hash(to_hex(fnv1a(canonical_config))), version(kArtifactVersion) {}

std::string to_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return std::string(buf);
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

void provenance_comment(std::ofstream& out, const Provenance& prov) {
    out << "# config_hash=" << prov.config_hash << " artifact_version=" << prov.version
        << "\n";
}

}  // namespace

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec,
                          const Provenance& prov, bool aborted) {
    auto out = open_out(path);
    out << "t,theta,r,dtheta,dr,tau,f,E\n";
    for (std::size_t i = 0; i < rec.size(); ++i) {
        out << format_double(rec.t[i]) << ',' << format_double(rec.theta[i]) << ','
            << format_double(rec.r[i]) << ',' << format_double(rec.dtheta[i]) << ','
            << format_double(rec.dr[i]) << ',' << format_double(rec.tau[i]) << ','
            << format_double(rec.f[i]) << ',' << format_double(rec.E[i]) << '\n';
    }
    if (aborted) out << "# aborted=true\n";
    provenance_comment(out, prov);
}

void write_pid_csv(const std::string& path, const PidRecord& rec, const Provenance& prov) {
    auto out = open_out(path);
    out << "t,theta,r,dtheta,dr,tau,f,E,tau_cmd_preclip,f_cmd_preclip,e_theta,e_r\n";
    const TrajectoryRecord& tr = rec.traj;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        out << format_double(tr.t[i]) << ',' << format_double(tr.theta[i]) << ','
            << format_double(tr.r[i]) << ',' << format_double(tr.dtheta[i]) << ','
            << format_double(tr.dr[i]) << ',' << format_double(tr.tau[i]) << ','
            << format_double(tr.f[i]) << ',' << format_double(tr.E[i]) << ','
            << format_double(rec.tau_cmd_preclip[i]) << ','
            << format_double(rec.f_cmd_preclip[i]) << ',' << format_double(rec.e_theta[i])
            << ',' << format_double(rec.e_r[i]) << '\n';
    }
    provenance_comment(out, prov);
}

namespace {

json params_json(const SystemParams& p) {
    return json{{"m", p.m}, {"g", p.g}, {"B1", p.B1}, {"B2", p.B2}};
}

const char* mode_name(InterpMode mode) {
    return mode == InterpMode::piecewise_linear ? "piecewise_linear"
                                                : "piecewise_constant_left";
}

}  // namespace

json protocol_to_json(const Protocol& proto, const SystemParams& params,
                      const std::optional<ActuatorBounds>& bounds, const Provenance& prov) {
    json meta{{"params", params_json(params)},
              {"config_hash", prov.config_hash},
              {"artifact_version", prov.version}};
    if (bounds.has_value())
        meta["bounds"] = json{{"tau_max", bounds->tau_max}, {"f_max", bounds->f_max}};
    json j{{"schema", "protocol-v1"},
           {"label", to_string(proto.label)},
           {"t_f", proto.t_f},
           {"mode", mode_name(proto.schedule.mode)},
           {"times", proto.schedule.times},
           {"tau", proto.schedule.tau},
           {"f", proto.schedule.f},
           {"metadata", meta}};
    if (!proto.schedule.breakpoints.empty()) j["breakpoints"] = proto.schedule.breakpoints;
    return j;
}

Protocol protocol_from_json(const json& j) {
    if (j.value("schema", "") != std::string("protocol-v1"))
        throw std::invalid_argument("protocol_from_json: missing protocol-v1 schema tag");
    Protocol proto;
    proto.label = protocol_label_from_string(j.at("label").get<std::string>());
    proto.t_f = j.at("t_f").get<double>();
    proto.schedule.times = j.at("times").get<std::vector<double>>();
    proto.schedule.tau = j.at("tau").get<std::vector<double>>();
    proto.schedule.f = j.at("f").get<std::vector<double>>();
    proto.schedule.mode = (j.value("mode", "piecewise_linear") == "piecewise_constant_left")
                              ? InterpMode::piecewise_constant_left
                              : InterpMode::piecewise_linear;
    if (j.contains("breakpoints"))
        proto.schedule.breakpoints = j.at("breakpoints").get<std::vector<double>>();
    proto.schedule.validate();
    return proto;
}

json ocp_to_json(const OcpSolution& sol, const SystemParams& params, const Provenance& prov) {
    // piecewise-constant schedule: one node per interval edge, left-held
    const std::size_t n = sol.tau.size();
    std::vector<double> times(n + 1), tau(n + 1), f(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        times[k] = sol.t_f * static_cast<double>(k) / static_cast<double>(n);
        tau[k] = sol.tau[std::min(k, n - 1)];
        f[k] = sol.f[std::min(k, n - 1)];
    }
    json j{{"schema", "protocol-v1"},
           {"label", to_string(ProtocolLabel::time_optimal)},
           {"t_f", sol.t_f},
           {"mode", "piecewise_constant_left"},
           {"times", times},
           {"tau", tau},
           {"f", f},
           {"metadata",
            {{"params", params_json(params)},
             {"bounds", {{"tau_max", sol.bounds.tau_max}, {"f_max", sol.bounds.f_max}}},
             {"config_hash", prov.config_hash},
             {"artifact_version", prov.version}}},
           {"diagnostics",
            {{"kkt_residual", sol.kkt_residual},
             {"saturation_fraction", {sol.saturation_fraction[0], sol.saturation_fraction[1]}},
             {"t_f_history", sol.t_f_history},
             {"terminal_residual",
              {sol.terminal_residual[0], sol.terminal_residual[1], sol.terminal_residual[2],
               sol.terminal_residual[3]}},
             {"feasible", sol.feasible}}}};
    return j;
}

json report_to_json(const RobustnessReport& rep, const Provenance& prov) {
    json cells = json::array();
    for (const CellResult& c : rep.cells) {
        cells.push_back(json{{"inputs", {c.input0, c.input1}},
                             {"RE", c.re},
                             {"final_state", {c.theta_f, c.r_f}},
                             {"aborted", c.aborted}});
    }
    return json{{"label", rep.label},
                {"spec",
                 {{"kind", rep.kind},
                  {"master_seed", rep.master_seed},
                  {"dt", rep.dt},
                  {"nominal_energy", rep.nominal_energy}}},
                {"cells", cells},
                {"MRE", rep.mre},
                {"aborted", rep.aborted},
                {"config_hash", prov.config_hash},
                {"artifact_version", prov.version}};
}

void write_report_csv(const std::string& path, const RobustnessReport& rep,
                      const Provenance& prov) {
    auto out = open_out(path);
    if (rep.kind == "grid") {
        out << "d_theta,d_r,RE\n";
        for (const CellResult& c : rep.cells) {
            if (c.aborted) continue;
            out << format_double(c.input0) << ',' << format_double(c.input1) << ','
                << format_double(c.re) << '\n';
        }
    } else {
        out << "trial,RE,theta_f,r_f\n";
        for (const CellResult& c : rep.cells) {
            if (c.aborted) continue;
            out << static_cast<long long>(c.input0) << ',' << format_double(c.re) << ','
                << format_double(c.theta_f) << ',' << format_double(c.r_f) << '\n';
        }
    }
    provenance_comment(out, prov);
}

json scan_to_json(const ScanResult& scan, const Provenance& prov) {
    return json{{"mode", scan.mode == ScanMode::matched ? "matched" : "mismatched"},
                {"B1", scan.b1},
                {"B2", scan.b2},
                {"RE", scan.re},
                {"dt", scan.dt},
                {"config_hash", prov.config_hash},
                {"artifact_version", prov.version}};
}

void write_scan_csv(const std::string& path, const ScanResult& scan, const Provenance& prov) {
    auto out = open_out(path);
    out << "B1,B2,RE\n";
    for (std::size_t i = 0; i < scan.b1.size(); ++i)
        for (std::size_t j = 0; j < scan.b2.size(); ++j)
            out << format_double(scan.b1[i]) << ',' << format_double(scan.b2[j]) << ','
                << format_double(scan.re[i * scan.b2.size() + j]) << '\n';
    provenance_comment(out, prov);
}

void write_json_file(const std::string& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    json j;
    in >> j;
    return j;
}

}  // namespace rtheta
