#pragma once
#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtheta/dynamics.hpp"
#include "rtheta/schedule.hpp"

namespace rtheta {

/// Fixed-step classical RK4 configuration.
struct SimConfig {
    double dt = 1e-3;       ///< step [s]; the final partial step is shortened
    std::uint64_t seed = 0; ///< base seed for any noise drawn during the run
};

/// Dense time series produced by the integrator: one row per step plus the
/// initial sample; the E column is the mechanical energy of the row's state.
struct TrajectoryRecord {
    std::vector<double> t, theta, r, dtheta, dr, tau, f, E;

    std::size_t size() const { return t.size(); }
    State state_at(std::size_t i) const { return State{theta[i], r[i], dtheta[i], dr[i]}; }
    State final_state() const { return state_at(size() - 1); }
    double final_energy() const { return E.back(); }
};

/// Thrown when the trajectory leaves the model's domain (r <= 0 or a
/// non-finite state); carries the failure time and the samples recorded up
/// to that point.
class SimulationAbort : public std::runtime_error {
public:
    SimulationAbort(double t_fail, TrajectoryRecord partial_record)
        : std::runtime_error("trajectory aborted at t = " + std::to_string(t_fail)),
          time_of_failure(t_fail),
          partial(std::move(partial_record)) {}

    double time_of_failure;
    TrajectoryRecord partial;
};

enum class NoiseKind { input, measurement, initial };
enum class NoiseDist { uniform, truncated_gaussian };

/// Bounded per-sample noise. For kind=input the bounds are (tau, f); for
/// kind=measurement they are (theta, r). truncated_gaussian draws are
/// zero-mean with sigma = sigma_fraction * bound, clamped to +-bound.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::input;
    NoiseDist dist = NoiseDist::truncated_gaussian;
    double sigma_fraction = 1.0 / 3.0;
    std::array<double, 2> bounds{0.0, 0.0};
};

inline NoiseSpec input_noise(double bound_tau, double bound_f,
                             NoiseDist dist = NoiseDist::truncated_gaussian) {
    return NoiseSpec{NoiseKind::input, dist, 1.0 / 3.0, {bound_tau, bound_f}};
}
inline NoiseSpec measurement_noise(double bound_theta, double bound_r,
                                   NoiseDist dist = NoiseDist::truncated_gaussian) {
    return NoiseSpec{NoiseKind::measurement, dist, 1.0 / 3.0, {bound_theta, bound_r}};
}

/// One clamped noise draw, deterministic in (seed, channel, sample_index).
double draw_noise(const NoiseSpec& spec, int channel, std::uint64_t seed,
                  std::uint64_t sample_index);

using InputFn = std::function<GenInput(double)>;

/// RK4 propagation of the closed dynamics under an arbitrary input function,
/// sampled at the RK4 stage times. Steps are shortened to land exactly on
/// t_end and on any declared input breakpoints. Throws SimulationAbort if
/// r <= 0.
TrajectoryRecord integrate_fn(const SystemParams& p, const State& x0, const InputFn& input,
                              double t_end, const SimConfig& cfg,
                              const std::vector<double>& breakpoints = {});

/// Schedule-driven propagation; inputs follow the schedule's interpolation mode.
TrajectoryRecord integrate(const SystemParams& p, const State& x0,
                           const InputSchedule& sched, const SimConfig& cfg);

/// New schedule on the same grid with independent per-sample noise added to
/// both channels; deterministic for a given seed.
InputSchedule perturb_schedule(const InputSchedule& sched, const NoiseSpec& spec,
                               std::uint64_t seed);

/// Noisy position read-back (theta, r); velocities are not measured.
std::array<double, 2> measure(const State& x, const NoiseSpec& spec, std::uint64_t seed,
                              std::uint64_t sample_index);

}  // namespace rtheta
