#pragma once
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rtheta/dynamics.hpp"
#include "rtheta/errors.hpp"
#include "rtheta/schedule.hpp"
#include "rtheta/trajectories.hpp"

namespace rtheta {

struct ActuatorBounds {
    double tau_max = 600.0;  ///< [kg m^2 s^-2]
    double f_max = 150.0;    ///< [N]
};

struct KinematicBounds {
    double dtheta_max = 0.4;   ///< [rad s^-1]
    double ddtheta_max = 0.3;  ///< [rad s^-2]
    double dr_max = 1.5;       ///< [m s^-1]
    double ddr_max = 1.2;      ///< [m s^-2]
};

enum class ProtocolLabel {
    sta_quintic,
    sta_seventh,
    constraint_limited,
    time_optimal,
    pid,
    sta_corrected,
};

const char* to_string(ProtocolLabel label);
ProtocolLabel protocol_label_from_string(const std::string& s);

/// An executable transfer strategy: the input schedule plus, where one
/// exists, the reference trajectory it was derived from.
struct Protocol {
    ProtocolLabel label = ProtocolLabel::sta_quintic;
    InputSchedule schedule;
    double t_f = 0.0;
    std::function<KinPoint(double)> reference;  ///< null when no reference exists
};

/// Inverse-dynamics input synthesis along a polynomial reference; returns a
/// piecewise-linear schedule on n_samples uniform points plus the reference
/// evaluator. Throws std::domain_error if the reference radius reaches <= 0.
Protocol sta_inputs(const SystemParams& p, const PolynomialProfile& profile,
                    int n_samples = 4001);

struct Bracket {
    double lo = 0.5;
    double hi = 20.0;
};

/// Feasibility scan across a duration bracket turned out non-monotone; the
/// per-duration results are attached for diagnosis.
class NonMonotoneFeasibility : public std::runtime_error {
public:
    explicit NonMonotoneFeasibility(std::vector<std::pair<double, bool>> scan_points)
        : std::runtime_error("min_feasible_tf: feasibility is not monotone across the bracket"),
          scan(std::move(scan_points)) {}
    std::vector<std::pair<double, bool>> scan;
};

/// Smallest duration for which the polynomial STA inputs stay inside the
/// actuator bounds, by bisection to within tol after a 50-point monotonicity
/// scan of the bracket. Peak inputs are probed on 4001 uniform samples.
double min_feasible_tf(const SystemParams& p, PolyOrder order, const Coord& q0,
                       const Coord& qf, const ActuatorBounds& bounds, double tol = 1e-3,
                       const Bracket& bracket = {});

/// Two synchronized trapezoid profiles sharing one arrival time.
struct TrapezoidPair {
    Coord q0;
    TrapezoidProfile theta;
    TrapezoidProfile r;
    double t_f = 0.0;

    KinPoint eval(double t) const;
};

/// Per-coordinate minimum-time trapezoids under the kinematic bounds, with
/// the faster coordinate slowed to the common arrival time.
TrapezoidPair plan_trapezoid_pair(const Coord& q0, const Coord& qf,
                                  const KinematicBounds& kb);

/// Bang-off-bang protocol: synchronized trapezoids mapped through inverse
/// dynamics on a dense grid (with breakpoints straddling the acceleration
/// switches). Returns a zero-duration gravity hold when both displacements
/// vanish.
Protocol constraint_limited_protocol(const SystemParams& p, const Coord& q0,
                                     const Coord& qf, const KinematicBounds& kb,
                                     int n_samples = 4001);

}  // namespace rtheta
