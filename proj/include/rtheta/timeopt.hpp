#pragma once
#include <array>
#include <cstdint>
#include <vector>

#include "rtheta/planners.hpp"
#include "rtheta/simulate.hpp"

namespace rtheta {

/// Direct-transcription setup for the actuator-bounded minimum-time problem.
/// Decision variables are the free final time and piecewise-constant controls
/// on n_intervals; terminal equality constraints are handled by an augmented
/// penalty outer loop.
struct OcpConfig {
    int n_intervals = 100;
    ActuatorBounds bounds;
    std::array<double, 2> terminal_pos_tol{1e-4, 1e-4};  ///< (rad, m)
    std::array<double, 2> terminal_vel_tol{1e-4, 1e-4};  ///< (rad/s, m/s)
    int max_outer_iters = 25;
    double penalty_growth = 5.0;
    std::uint64_t seed = 0;

    // solver internals (defaults are fine for the nominal transfer)
    int substeps = 4;        ///< RK4 substeps per control interval
    int inner_iters = 1500;  ///< projected-gradient iterations per outer pass
    /// Quadratic penalty on control increments. The default reports the
    /// representative solution balancing transfer time against actuation
    /// smoothness; weights near zero chase faster but strongly oscillating
    /// optima.
    double smoothing = 0.15;
    double t_lo = 0.02;  ///< duration box [s]
    double t_hi = 10.0;
    double mu0 = 10.0;  ///< initial penalty weight
};

struct OcpSolution {
    double t_f = 0.0;
    ActuatorBounds bounds;
    std::vector<double> tau;  ///< piecewise-constant, one value per interval
    std::vector<double> f;
    std::vector<State> states;  ///< at the n_intervals+1 interval nodes
    double kkt_residual = 0.0;
    std::array<double, 2> saturation_fraction{0.0, 0.0};  ///< (tau, f) channels
    std::array<double, 4> multipliers{0.0, 0.0, 0.0, 0.0};
    std::vector<double> t_f_history;
    std::array<double, 4> terminal_residual{0.0, 0.0, 0.0, 0.0};
    bool feasible = false;
};

/// The solver ran out of outer iterations without meeting the terminal
/// tolerances; carries the best iterate found.
class ConvergenceFailure : public std::runtime_error {
public:
    ConvergenceFailure(const std::string& what, OcpSolution best_iterate)
        : std::runtime_error(what), best(std::move(best_iterate)) {}
    OcpSolution best;
};

/// Minimum-time transfer between two rest configurations under box input
/// bounds. Multistart (time-compressed smooth-reference inputs, saturated
/// bang-bang guesses, gravity hold); returns the best feasible solution.
OcpSolution solve_time_optimal(const SystemParams& p, const State& x0, const State& xf,
                               const OcpConfig& cfg);

/// Costates integrated backward along a solution, plus the switching
/// functions alpha_tau = p3/(m r^2) and alpha_f = p4/m.
struct CostateTrace {
    std::vector<double> t;
    std::vector<double> p1, p2, p3, p4;
    std::vector<double> alpha_tau, alpha_f;
    std::array<double, 2> sign_consistency{1.0, 1.0};  ///< over saturated intervals
    std::array<int, 2> saturated_intervals{0, 0};
    double hamiltonian_rms = 0.0;
    bool used_multipliers = false;  ///< false: least-squares terminal costate fit
    bool reliable = true;
};

/// A posteriori optimality diagnostics: terminal costate from the
/// transcription multipliers when they keep the control Hamiltonian near
/// zero, otherwise a least-squares fit; sign consistency of the switching
/// functions on saturated intervals. Returns an empty trace for
/// zero-duration solutions.
CostateTrace pmp_diagnostics(const SystemParams& p, const OcpSolution& sol);

}  // namespace rtheta
