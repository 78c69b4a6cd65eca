#pragma once
#include "rtheta/dynamics.hpp"

namespace rtheta {

enum class PolyOrder { quintic, seventh };

struct ShapeVals {
    double sigma;    ///< shape value, 0 at s=0 and 1 at s=1
    double dsigma;   ///< d(sigma)/ds
    double ddsigma;  ///< d2(sigma)/ds2
};

/// Evaluates the endpoint-stationary shape function and its first two
/// derivatives with respect to the normalized time s in [0,1].
///   quintic:  6 s^5 - 15 s^4 + 10 s^3
///   seventh:  20 s^7 - 76 s^6 + 114 s^5 - 83 s^4 + 26 s^3
/// Throws std::domain_error for s outside [0,1].
ShapeVals shape_eval(PolyOrder order, double s);

/// Boundary-conditioned polynomial trajectory between two rest
/// configurations. Positions follow q0 + d*sigma(t/t_f); time derivatives
/// carry the 1/t_f and 1/t_f^2 scalings.
struct PolynomialProfile {
    PolyOrder order = PolyOrder::quintic;
    Coord q0;
    Coord qf;
    double t_f = 1.0;  ///< duration [s], > 0

    /// Throws std::domain_error for t outside [0, t_f].
    KinPoint eval(double t) const;
};

/// One-coordinate accelerate/coast/decelerate profile. All phase algebra is
/// done on |d|; the sign of d is applied at evaluation time.
struct TrapezoidProfile {
    double d = 0.0;        ///< signed displacement
    double a = 0.0;        ///< acceleration magnitude in use
    double v_coast = 0.0;  ///< coasting speed in use
    double t_acc = 0.0;
    double t_coast = 0.0;
    double t_dec = 0.0;

    double total_time() const { return t_acc + t_coast + t_dec; }

    /// Signed offset from the start, velocity and acceleration at time t.
    /// Holds the final rest point for t past the profile end.
    void eval(double t, double& x, double& v, double& acc) const;
};

/// Minimum-duration profile for displacement d under |v| <= v_max and
/// |a| <= a_max. Degenerates to a triangular profile (no coast) when
/// |d| < v_max^2 / a_max, and to a zero-duration profile when d = 0.
TrapezoidProfile trapezoid_min_time(double d, double v_max, double a_max);

/// Slows the profile down to exactly target_duration by reducing the coast
/// velocity, keeping the acceleration magnitude. Displacement is preserved
/// exactly. Throws InfeasibleError if target_duration < total_time().
TrapezoidProfile stretch_to_duration(const TrapezoidProfile& prof, double target_duration);

/// Returns the fast profile re-timed to arrive together with the slow one.
/// Requires slow.total_time() >= fast.total_time().
TrapezoidProfile synchronize_profiles(const TrapezoidProfile& slow,
                                      const TrapezoidProfile& fast);

}  // namespace rtheta
