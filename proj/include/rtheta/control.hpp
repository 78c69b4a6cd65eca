#pragma once
#include <array>
#include <cstdint>
#include <functional>
#include <optional>

#include "rtheta/planners.hpp"
#include "rtheta/robustness.hpp"
#include "rtheta/simulate.hpp"

namespace rtheta {

/// Component-wise PID gains mapping channel position error to channel input.
struct PidGains {
    double kp_theta = 2.1e4;  ///< [kg m^2 s^-2 rad^-1]
    double ki_theta = 1.5e4;
    double kd_theta = 70.0;
    double kp_r = 2.1e4;  ///< [kg s^-2]
    double ki_r = 1.5e4;
    double kd_r = 70.0;
};

enum class AntiWindup { clamp_integrator, conditional_integration };
enum class Feedforward { none, nominal_schedule };

struct PidConfig {
    PidGains gains;
    double dt_sample = 0.01;  ///< controller period [s]
    ActuatorBounds bounds;
    AntiWindup anti_windup = AntiWindup::clamp_integrator;
    Feedforward feedforward = Feedforward::none;
    double dt_sim = 1e-3;  ///< plant integration step between samples [s]
};

/// Trajectory plus the controller-side columns of the extended CSV. The
/// per-sample integrator states are kept for inspection (not serialized).
struct PidRecord {
    TrajectoryRecord traj;
    std::vector<double> tau_cmd_preclip;
    std::vector<double> f_cmd_preclip;
    std::vector<double> e_theta;
    std::vector<double> e_r;
    std::vector<double> integral_theta;  ///< one entry per controller sample
    std::vector<double> integral_r;
    std::vector<double> sample_preclip_tau;  ///< one entry per controller sample
    std::vector<double> sample_preclip_f;
};

using ReferenceFn = std::function<KinPoint(double)>;

/// Discrete-time PID tracking of a reference trajectory with zero-order-hold
/// commands, saturation and the configured anti-windup. Position errors come
/// from (optionally noisy) measurements; velocities are not measured.
/// input_noise, when given, is added to the held command after clipping.
/// feedforward = nominal_schedule requires a nominal input schedule.
PidRecord pid_track(const SystemParams& p, const ReferenceFn& reference, double t_f,
                    const PidConfig& cfg, const State& x0,
                    const NoiseSpec* meas_noise = nullptr,
                    const NoiseSpec* input_noise = nullptr, std::uint64_t seed = 0,
                    const InputSchedule* nominal = nullptr);

enum class CorrectionMode { literal_hold, multiplicative };

/// Single-shot two-stage correction parameters. Stage durations follow from
/// the measured error: t1 = |e(t_i)/v_ref(t_i)| per channel, t2 = t1/c1.
struct CorrectionConfig {
    double t_i = 0.5;  ///< measurement instant [s], 0 < t_i < t_f
    double c1 = 2.0;
    double c2 = 1.0;
    double c3 = 0.1;
    double c4 = 1.0;
    double c5 = 0.1;
    CorrectionMode mode = CorrectionMode::literal_hold;
};

struct CorrectionOutcome {
    TrajectoryRecord traj;
    std::array<double, 2> e_meas{0.0, 0.0};  ///< measured (theta, r) error at t_i
    std::array<double, 2> t1{0.0, 0.0};
    std::array<double, 2> t2{0.0, 0.0};
    std::array<double, 2> factor_stage1{1.0, 1.0};
    std::array<double, 2> factor_stage2{1.0, 1.0};
};

/// Runs the nominal protocol open loop, takes one position measurement at
/// cfg.t_i, and applies the per-channel two-stage scaled-input windows.
/// Inputs are clipped to `bounds` when given. Throws InfeasibleError when a
/// correction window would run past t_f, and std::domain_error when a
/// reference velocity vanishes while the measured error does not.
CorrectionOutcome single_shot_correct(const SystemParams& p, const Protocol& nominal,
                                      const CorrectionConfig& cfg, const State& x0_perturbed,
                                      const NoiseSpec* meas_noise = nullptr,
                                      std::uint64_t seed = 0, const SimConfig& sim = {},
                                      const std::optional<ActuatorBounds>& bounds = std::nullopt);

struct CalibrationResult {
    CorrectionConfig config;
    double corrected_mre = 0.0;
    double uncorrected_mre = 0.0;
    bool improved = false;  ///< false means "no-improvement" sentinel
};

/// Deterministic coarse grid search over (t_i, c1..c5) minimizing the
/// initial-error-grid MRE of the corrected protocol. Candidates are ranked
/// on a subsampled grid first; the shortlist is rescored on the full grid.
CalibrationResult calibrate_correction(const SystemParams& p, const Protocol& nominal,
                                       const GridSpec& grid, const State& x0_nominal,
                                       const SimConfig& sim = {},
                                       const std::optional<ActuatorBounds>& bounds =
                                           ActuatorBounds{},
                                       int threads = 0);

}  // namespace rtheta
