#pragma once
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rtheta/planners.hpp"
#include "rtheta/simulate.hpp"

namespace rtheta {

/// |(E_delta - E_f) / E_f|. Throws std::domain_error when E_f = 0.
double re_metric(double E_f, double E_delta);

/// Symmetric initial-error grid; odd counts keep the zero-error point on it.
struct GridSpec {
    double dtheta_half = M_PI / 1800.0;  ///< [rad]
    int n_theta = 21;
    double dr_half = 0.01;  ///< [m]
    int n_r = 21;

    void validate() const;
    std::size_t cells() const { return static_cast<std::size_t>(n_theta) * n_r; }
    /// Cell offsets in row-major order (theta outer, r inner).
    std::pair<double, double> offset(std::size_t index) const;
};

struct CellResult {
    double input0 = 0.0;  ///< d_theta [rad] for grids, trial index for trials
    double input1 = 0.0;  ///< d_r [m] for grids, unused for trials
    double re = 0.0;
    double theta_f = 0.0;
    double r_f = 0.0;
    bool aborted = false;
};

/// Grid- or trial-indexed relative-energy-error data with its aggregate MRE.
/// Aborted cells are excluded from the MRE but kept in the cell list.
struct RobustnessReport {
    std::string label;
    std::string kind;  ///< "grid" or "trials"
    std::vector<CellResult> cells;
    double mre = 0.0;
    double nominal_energy = 0.0;
    std::vector<std::size_t> aborted;
    std::uint64_t master_seed = 0;
    double dt = 0.0;
};

/// Runs a protocol (or controller closure) from a perturbed start; must be a
/// pure function of the initial state.
using Runner = std::function<TrajectoryRecord(const State&)>;

/// RE over every (d_theta, d_r) start against the runner's own nominal run.
RobustnessReport initial_error_grid(const Runner& runner, const State& x0_nominal,
                                    const GridSpec& grid, const std::string& label,
                                    int threads = 0);

/// Per-trial schedule perturbation with derived seeds; RE and final
/// configuration per trial against the unperturbed run.
RobustnessReport input_noise_trials(const SystemParams& p, const Protocol& protocol,
                                    int n_trials, const NoiseSpec& noise,
                                    std::uint64_t master_seed, const SimConfig& cfg,
                                    const State& x0_nominal, int threads = 0);

enum class ScanMode { matched, mismatched };

/// RE over a (B1, B2) grid for a polynomial STA transfer.
///   matched:    inputs re-derived at each cell's damping and applied to the
///               matching plant; RE against the ideal target energy isolates
///               the numerical residual.
///   mismatched: inputs derived once at the base damping and applied to the
///               scanned plant; RE against the base-plant nominal run.
struct ScanResult {
    ScanMode mode = ScanMode::matched;
    std::vector<double> b1;  ///< axis values
    std::vector<double> b2;
    std::vector<double> re;  ///< row-major over (b1, b2)
    double dt = 0.0;
};

ScanResult dissipation_scan(const SystemParams& p_base, const PolynomialProfile& profile,
                            double b1_lo, double b1_hi, int n1, double b2_lo, double b2_hi,
                            int n2, ScanMode mode, double dt = 1e-4, int threads = 0);

}  // namespace rtheta
