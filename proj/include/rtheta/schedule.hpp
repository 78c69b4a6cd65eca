#pragma once
#include <functional>
#include <vector>

#include "rtheta/dynamics.hpp"

namespace rtheta {

enum class InterpMode { piecewise_linear, piecewise_constant_left };

/// Time-parameterized generalized input pair on a strictly increasing grid
/// starting at 0. The central exchange object between planners, the
/// simulator and the serialization layer.
struct InputSchedule {
    std::vector<double> times;
    std::vector<double> tau;
    std::vector<double> f;
    InterpMode mode = InterpMode::piecewise_linear;
    /// Known input discontinuities; the integrator ends a step on each so no
    /// RK4 step straddles a jump. Empty for smooth schedules.
    std::vector<double> breakpoints;

    double t_end() const { return times.empty() ? 0.0 : times.back(); }

    /// Input at time t; t is clamped to [0, t_end]. Grid nodes evaluate to
    /// the stored node values exactly in both interpolation modes.
    GenInput at(double t) const;

    /// Throws std::invalid_argument on malformed grids or non-finite values.
    void validate() const;
};

/// Samples fn on n_samples uniform points over [0, t_f].
InputSchedule sample_schedule(const std::function<GenInput(double)>& fn, double t_f,
                              int n_samples, InterpMode mode = InterpMode::piecewise_linear);

/// Same input signal on a denser grid: the original nodes plus uniform fill
/// so that no two nodes are further apart than max_spacing. Useful to give
/// schedules on different grids a common per-sample noise bandwidth.
InputSchedule resample_schedule(const InputSchedule& s, double max_spacing);

}  // namespace rtheta
