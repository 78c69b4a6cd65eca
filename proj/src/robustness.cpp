#include "rtheta/robustness.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rtheta/rng.hpp"
#include "rtheta/util.hpp"

namespace rtheta {

double re_metric(double E_f, double E_delta) {
    if (E_f == 0.0) throw std::domain_error("re_metric: undefined for E_f = 0");
    return std::abs((E_delta - E_f) / E_f);
}

void GridSpec::validate() const {
    if (n_theta < 3 || n_r < 3) throw std::invalid_argument("GridSpec: counts must be >= 3");
    if (n_theta % 2 == 0 || n_r % 2 == 0)
        throw std::invalid_argument("GridSpec: counts must be odd");
    if (dtheta_half < 0.0 || dr_half < 0.0)
        throw std::invalid_argument("GridSpec: ranges must be >= 0");
}

std::pair<double, double> GridSpec::offset(std::size_t index) const {
    const std::size_t i = index / static_cast<std::size_t>(n_r);
    const std::size_t j = index % static_cast<std::size_t>(n_r);
    const double dth = -dtheta_half + 2.0 * dtheta_half * static_cast<double>(i) / (n_theta - 1);
    const double drr = -dr_half + 2.0 * dr_half * static_cast<double>(j) / (n_r - 1);
    return {dth, drr};
}

namespace {

double finalize_mre(RobustnessReport& rep) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < rep.cells.size(); ++i) {
        if (rep.cells[i].aborted) {
            rep.aborted.push_back(i);
        } else {
            sum += rep.cells[i].re;
            ++n;
        }
    }
    rep.mre = (n > 0) ? sum / static_cast<double>(n) : 0.0;
    return rep.mre;
}

}  // namespace

RobustnessReport initial_error_grid(const Runner& runner, const State& x0_nominal,
                                    const GridSpec& grid, const std::string& label,
                                    int threads) {
    grid.validate();
    RobustnessReport rep;
    rep.label = label;
    rep.kind = "grid";
    const TrajectoryRecord nominal = runner(x0_nominal);
    rep.nominal_energy = nominal.final_energy();
    if (rep.nominal_energy == 0.0)
        throw std::domain_error("initial_error_grid: nominal final energy is zero");

    rep.cells.resize(grid.cells());
    parallel_for(grid.cells(), threads, [&](std::size_t idx) {
        const auto [dth, drr] = grid.offset(idx);
        CellResult& cell = rep.cells[idx];
        cell.input0 = dth;
        cell.input1 = drr;
        State x0 = x0_nominal;
        x0.theta += dth;
        x0.r += drr;
        try {
            const TrajectoryRecord rec = runner(x0);
            const State xf = rec.final_state();
            cell.re = re_metric(rep.nominal_energy, rec.final_energy());
            cell.theta_f = xf.theta;
            cell.r_f = xf.r;
        } catch (const SimulationAbort&) {
            cell.aborted = true;
        }
    });
    finalize_mre(rep);
    return rep;
}

RobustnessReport input_noise_trials(const SystemParams& p, const Protocol& protocol,
                                    int n_trials, const NoiseSpec& noise,
                                    std::uint64_t master_seed, const SimConfig& cfg,
                                    const State& x0_nominal, int threads) {
    if (n_trials < 100)
        throw std::invalid_argument("input_noise_trials: n_trials must be >= 100");
    if (noise.kind != NoiseKind::input)
        throw std::invalid_argument("input_noise_trials: noise.kind must be input");
    RobustnessReport rep;
    rep.label = to_string(protocol.label);
    rep.kind = "trials";
    rep.master_seed = master_seed;
    rep.dt = cfg.dt;
    const TrajectoryRecord nominal = integrate(p, x0_nominal, protocol.schedule, cfg);
    rep.nominal_energy = nominal.final_energy();
    if (rep.nominal_energy == 0.0)
        throw std::domain_error("input_noise_trials: nominal final energy is zero");

    rep.cells.resize(static_cast<std::size_t>(n_trials));
    parallel_for(rep.cells.size(), threads, [&](std::size_t trial) {
        CellResult& cell = rep.cells[trial];
        cell.input0 = static_cast<double>(trial);
        const std::uint64_t seed = rng::derive(master_seed, trial);
        const InputSchedule noisy = perturb_schedule(protocol.schedule, noise, seed);
        try {
            const TrajectoryRecord rec = integrate(p, x0_nominal, noisy, cfg);
            const State xf = rec.final_state();
            cell.re = re_metric(rep.nominal_energy, rec.final_energy());
            cell.theta_f = xf.theta;
            cell.r_f = xf.r;
        } catch (const SimulationAbort&) {
            cell.aborted = true;
        }
    });
    finalize_mre(rep);
    return rep;
}

ScanResult dissipation_scan(const SystemParams& p_base, const PolynomialProfile& profile,
                            double b1_lo, double b1_hi, int n1, double b2_lo, double b2_hi,
                            int n2, ScanMode mode, double dt, int threads) {
    if (n1 < 5 || n2 < 5)
        throw std::invalid_argument("dissipation_scan: counts must be >= 5 per axis");
    ScanResult res;
    res.mode = mode;
    res.dt = dt;
    res.b1.resize(static_cast<std::size_t>(n1));
    res.b2.resize(static_cast<std::size_t>(n2));
    for (int i = 0; i < n1; ++i) res.b1[static_cast<std::size_t>(i)] = b1_lo + (b1_hi - b1_lo) * i / (n1 - 1);
    for (int j = 0; j < n2; ++j) res.b2[static_cast<std::size_t>(j)] = b2_lo + (b2_hi - b2_lo) * j / (n2 - 1);
    res.re.assign(static_cast<std::size_t>(n1) * n2, std::numeric_limits<double>::quiet_NaN());

    const State x0{profile.q0.theta, profile.q0.r, 0.0, 0.0};
    const SimConfig cfg{dt, 0};

    // reference energy: ideal target for matched, base-plant nominal run for
    // mismatched (there the base run is the design point itself)
    const double e_target =
        p_base.m * p_base.g * profile.qf.r * std::sin(profile.qf.theta);
    double e_ref = e_target;
    if (mode == ScanMode::mismatched) {
        const TrajectoryRecord nom = integrate_fn(
            p_base, x0,
            [&](double t) { return inverse_dynamics(p_base, profile.eval(t)); },
            profile.t_f, cfg);
        e_ref = nom.final_energy();
    }

    parallel_for(res.re.size(), threads, [&](std::size_t idx) {
        const std::size_t i = idx / static_cast<std::size_t>(n2);
        const std::size_t j = idx % static_cast<std::size_t>(n2);
        SystemParams plant = p_base;
        plant.B1 = res.b1[i];
        plant.B2 = res.b2[j];
        const SystemParams& design = (mode == ScanMode::matched) ? plant : p_base;
        try {
            const TrajectoryRecord rec = integrate_fn(
                plant, x0,
                [&](double t) { return inverse_dynamics(design, profile.eval(t)); },
                profile.t_f, cfg);
            res.re[idx] = re_metric(e_ref, rec.final_energy());
        } catch (const SimulationAbort&) {
            // leave NaN: integration left the model domain
        }
    });
    return res;
}

}  // namespace rtheta
