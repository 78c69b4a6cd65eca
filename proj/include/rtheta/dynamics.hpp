#pragma once
#include <array>

namespace rtheta {

/// Physical constants of the r-theta manipulator.
struct SystemParams {
    double m  = 20.0;   ///< point mass [kg]
    double g  = 9.8;    ///< gravitational acceleration [m s^-2]
    double B1 = 100.0;  ///< angular damping [kg m^2 s^-1 rad^-1]
    double B2 = 50.0;   ///< radial damping [kg s^-1]

    /// Throws std::invalid_argument unless m > 0 and g, B1, B2 >= 0.
    void validate() const;
};

/// Instantaneous configuration and velocity. The model requires r > 0
/// (the inertia entry m r^2 must stay invertible).
struct State {
    double theta  = 0.0;  ///< [rad]
    double r      = 1.0;  ///< [m]
    double dtheta = 0.0;  ///< [rad s^-1]
    double dr     = 0.0;  ///< [m s^-1]
};

/// Generalized input pair Q = [tau, f].
struct GenInput {
    double tau = 0.0;  ///< generalized torque [kg m^2 s^-2]
    double f   = 0.0;  ///< generalized radial force [N]
};

/// Configuration pair (theta, r).
struct Coord {
    double theta = 0.0;  ///< [rad]
    double r     = 0.0;  ///< [m]
};

/// Position, velocity and acceleration of both coordinates at one instant.
struct KinPoint {
    Coord q;    ///< (rad, m)
    Coord dq;   ///< (rad s^-1, m s^-1)
    Coord ddq;  ///< (rad s^-2, m s^-2)
};

struct Accel {
    double ddtheta = 0.0;  ///< [rad s^-2]
    double ddr     = 0.0;  ///< [m s^-2]
};

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Closed-form forward dynamics. Throws std::domain_error if x.r <= 0 or
/// the result is not finite.
Accel forward_accel(const SystemParams& p, const State& x, const GenInput& u);

/// Generalized inputs required to realize the kinematic point k.
/// Throws std::domain_error if k.q.r <= 0.
GenInput inverse_dynamics(const SystemParams& p, const KinPoint& k);

/// E = 1/2 m r^2 dtheta^2 + 1/2 m dr^2 + m g r sin(theta).
double mechanical_energy(const SystemParams& p, const State& x);

/// Instantaneous energy rate dE/dt = -B1 dtheta^2 - B2 dr^2 + tau dtheta + f dr.
double power_balance(const SystemParams& p, const State& x, const GenInput& u);

/// Gravity load G(q) = (m g r cos(theta), m g sin(theta)). An input equal to
/// G(q) holds the system stationary at q.
GenInput gravity_vector(const SystemParams& p, const Coord& q);

/// Effective stiffness dG/dq at q_f; symmetric by construction.
Mat2 linearized_stiffness(const SystemParams& p, const Coord& q_f);

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
std::array<double, 2> symmetric_eigenvalues(const Mat2& k);

inline State state_of(const KinPoint& k) {
    return State{k.q.theta, k.q.r, k.dq.theta, k.dq.r};
}

inline double kinetic_energy(const SystemParams& p, const State& x) {
    return 0.5 * p.m * x.r * x.r * x.dtheta * x.dtheta + 0.5 * p.m * x.dr * x.dr;
}

}  // namespace rtheta
