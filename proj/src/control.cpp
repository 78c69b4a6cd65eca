#include "rtheta/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtheta/util.hpp"

namespace rtheta {

namespace {

State rk4_const_input(const SystemParams& p, const State& x, const GenInput& u, double h) {
    auto deriv = [&](const State& s) {
        const Accel a = forward_accel(p, s, u);
        return std::array<double, 4>{s.dtheta, s.dr, a.ddtheta, a.ddr};
    };
    auto advance = [](const State& s, const std::array<double, 4>& d, double hh) {
        return State{s.theta + hh * d[0], s.r + hh * d[1], s.dtheta + hh * d[2],
                     s.dr + hh * d[3]};
    };
    const auto k1 = deriv(x);
    const auto k2 = deriv(advance(x, k1, 0.5 * h));
    const auto k3 = deriv(advance(x, k2, 0.5 * h));
    const auto k4 = deriv(advance(x, k3, h));
    return State{x.theta + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                 x.r + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
                 x.dtheta + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
                 x.dr + h / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])};
}

bool state_valid(const State& x) {
    return x.r > 0.0 && std::isfinite(x.theta) && std::isfinite(x.r) &&
           std::isfinite(x.dtheta) && std::isfinite(x.dr);
}

void push_pid_row(PidRecord& rec, const SystemParams& p, double t, const State& x,
                  const GenInput& applied, const GenInput& preclip, double et, double er) {
    rec.traj.t.push_back(t);
    rec.traj.theta.push_back(x.theta);
    rec.traj.r.push_back(x.r);
    rec.traj.dtheta.push_back(x.dtheta);
    rec.traj.dr.push_back(x.dr);
    rec.traj.tau.push_back(applied.tau);
    rec.traj.f.push_back(applied.f);
    rec.traj.E.push_back(mechanical_energy(p, x));
    rec.tau_cmd_preclip.push_back(preclip.tau);
    rec.f_cmd_preclip.push_back(preclip.f);
    rec.e_theta.push_back(et);
    rec.e_r.push_back(er);
}

struct PidChannel {
    double kp, ki, kd, bound;
    double integral = 0.0;
    double prev_error = 0.0;
    bool first = true;

    // one controller update: returns (preclip, clipped) and applies the
    // configured anti-windup to the integrator state
    std::pair<double, double> update(double e, double dt, double ff, AntiWindup aw) {
        double integral_cand = integral + e * dt;
        if (aw == AntiWindup::clamp_integrator && ki > 0.0) {
            const double lim = bound / ki;
            integral_cand = std::clamp(integral_cand, -lim, lim);
        }
        const double de = first ? 0.0 : (e - prev_error) / dt;
        const double pre = kp * e + ki * integral_cand + kd * de + ff;
        const bool saturated = pre > bound || pre < -bound;
        if (aw == AntiWindup::conditional_integration && saturated) {
            // integrator untouched on samples that exceeded a bound
        } else {
            integral = integral_cand;
        }
        prev_error = e;
        first = false;
        return {pre, std::clamp(pre, -bound, bound)};
    }
};

}  // namespace

PidRecord pid_track(const SystemParams& p, const ReferenceFn& reference, double t_f,
                    const PidConfig& cfg, const State& x0, const NoiseSpec* meas_noise,
                    const NoiseSpec* input_noise, std::uint64_t seed,
                    const InputSchedule* nominal) {
    p.validate();
    if (!(t_f > 0.0)) throw std::invalid_argument("pid_track: t_f must be > 0");
    if (!(cfg.dt_sample > 0.0) || !(cfg.dt_sim > 0.0))
        throw std::invalid_argument("pid_track: sampling and simulation steps must be > 0");
    if (cfg.feedforward == Feedforward::nominal_schedule && nominal == nullptr)
        throw std::invalid_argument("pid_track: nominal schedule required for feedforward");
    if (!(x0.r > 0.0)) throw std::domain_error("pid_track: x0.r must be > 0");

    PidChannel ch_theta{cfg.gains.kp_theta, cfg.gains.ki_theta, cfg.gains.kd_theta,
                        cfg.bounds.tau_max};
    PidChannel ch_r{cfg.gains.kp_r, cfg.gains.ki_r, cfg.gains.kd_r, cfg.bounds.f_max};

    PidRecord rec;
    State x = x0;
    const std::size_t n_samples =
        static_cast<std::size_t>(std::ceil(t_f / cfg.dt_sample - 1e-9));

    bool first_row = true;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double t_k = k * cfg.dt_sample;
        const double t_next = (k + 1 == n_samples) ? t_f : (k + 1) * cfg.dt_sample;

        double th_meas = x.theta, r_meas = x.r;
        if (meas_noise != nullptr) {
            const auto m = measure(x, *meas_noise, seed, k);
            th_meas = m[0];
            r_meas = m[1];
        }
        const KinPoint ref = reference(t_k);
        const double e_th = ref.q.theta - th_meas;
        const double e_rr = ref.q.r - r_meas;

        GenInput ff{0.0, 0.0};
        if (cfg.feedforward == Feedforward::nominal_schedule) ff = nominal->at(t_k);
        const auto [pre_tau, cmd_tau] = ch_theta.update(e_th, cfg.dt_sample, ff.tau, cfg.anti_windup);
        const auto [pre_f, cmd_f] = ch_r.update(e_rr, cfg.dt_sample, ff.f, cfg.anti_windup);
        rec.integral_theta.push_back(ch_theta.integral);
        rec.integral_r.push_back(ch_r.integral);
        rec.sample_preclip_tau.push_back(pre_tau);
        rec.sample_preclip_f.push_back(pre_f);

        GenInput applied{cmd_tau, cmd_f};
        if (input_noise != nullptr) {
            applied.tau += draw_noise(*input_noise, 0, seed, k);
            applied.f += draw_noise(*input_noise, 1, seed, k);
        }

        if (first_row) {
            push_pid_row(rec, p, 0.0, x, applied, GenInput{pre_tau, pre_f}, e_th, e_rr);
            first_row = false;
        }

        // zero-order hold over the control period, integrated at dt_sim
        const std::size_t n_sub = static_cast<std::size_t>(
            std::ceil((t_next - t_k) / cfg.dt_sim - 1e-9));
        for (std::size_t j = 0; j < n_sub; ++j) {
            const double t0 = t_k + j * cfg.dt_sim;
            const double t1 = (j + 1 == n_sub) ? t_next : t_k + (j + 1) * cfg.dt_sim;
            try {
                x = rk4_const_input(p, x, applied, t1 - t0);
            } catch (const std::domain_error&) {
                throw SimulationAbort(t1, std::move(rec.traj));
            }
            if (!state_valid(x)) throw SimulationAbort(t1, std::move(rec.traj));
            push_pid_row(rec, p, t1, x, applied, GenInput{pre_tau, pre_f}, e_th, e_rr);
        }
    }
    return rec;
}

CorrectionOutcome single_shot_correct(const SystemParams& p, const Protocol& nominal,
                                      const CorrectionConfig& cfg, const State& x0_perturbed,
                                      const NoiseSpec* meas_noise, std::uint64_t seed,
                                      const SimConfig& sim,
                                      const std::optional<ActuatorBounds>& bounds) {
    p.validate();
    if (!nominal.reference)
        throw std::invalid_argument("single_shot_correct: protocol carries no reference");
    if (!(cfg.t_i > 0.0 && cfg.t_i < nominal.t_f))
        throw std::invalid_argument("single_shot_correct: t_i outside (0, t_f)");
    if (!(cfg.c1 > 0.0) || !(cfg.c3 > 0.0) || !(cfg.c5 > 0.0))
        throw std::invalid_argument("single_shot_correct: c1, c3, c5 must be > 0");

    // open-loop prefix up to the measurement instant
    const TrajectoryRecord prefix = integrate_fn(
        p, x0_perturbed, [&](double t) { return nominal.schedule.at(t); }, cfg.t_i, sim,
        nominal.schedule.breakpoints);
    const State x_i = prefix.final_state();

    std::array<double, 2> meas{x_i.theta, x_i.r};
    if (meas_noise != nullptr) meas = measure(x_i, *meas_noise, seed, 0);

    const KinPoint ref_i = nominal.reference(cfg.t_i);
    const KinPoint ref_0 = nominal.reference(0.0);
    const KinPoint ref_f = nominal.reference(nominal.t_f);
    const std::array<double, 2> e{ref_i.q.theta - meas[0], ref_i.q.r - meas[1]};
    const std::array<double, 2> v{ref_i.dq.theta, ref_i.dq.r};
    const std::array<double, 2> span{ref_f.q.theta - ref_0.q.theta,
                                     ref_f.q.r - ref_0.q.r};

    CorrectionOutcome out;
    out.e_meas = e;
    std::array<double, 2> eps{0.0, 0.0};
    for (int c = 0; c < 2; ++c) {
        // dead band: errors far below the sensing scale fire no correction
        const double dead = 1e-6 * std::max(std::abs(span[c]), 1e-3);
        if (std::abs(e[c]) <= dead) continue;
        if (std::abs(v[c]) < 1e-9)
            throw std::domain_error(
                "single_shot_correct: reference velocity vanishes with nonzero error");
        out.t1[c] = std::abs(e[c] / v[c]);
        out.t2[c] = out.t1[c] / cfg.c1;
        eps[c] = (std::abs(span[c]) > 1e-12) ? e[c] / span[c] : 0.0;
        if (cfg.t_i + out.t1[c] + out.t2[c] >= nominal.t_f)
            throw InfeasibleError("single_shot_correct: correction window exceeds t_f");
        out.factor_stage1[c] = 1.0 + cfg.c2 / (out.t1[c] + cfg.c3) * eps[c];
        out.factor_stage2[c] = 1.0 - cfg.c4 / (out.t2[c] + cfg.c5) * eps[c];
    }

    const double t_i = cfg.t_i;
    const bool hold = (cfg.mode == CorrectionMode::literal_hold);
    const GenInput u_hold = nominal.schedule.at(t_i);
    auto corrected = [&, t_i, hold, u_hold](double t) {
        GenInput u = nominal.schedule.at(t);
        const std::array<double, 2> base{hold ? u_hold.tau : u.tau, hold ? u_hold.f : u.f};
        std::array<double, 2> val{u.tau, u.f};
        for (int c = 0; c < 2; ++c) {
            if (out.t1[c] <= 0.0) continue;
            if (t >= t_i && t < t_i + out.t1[c])
                val[c] = base[c] * out.factor_stage1[c];
            else if (t >= t_i + out.t1[c] && t < t_i + out.t1[c] + out.t2[c])
                val[c] = base[c] * out.factor_stage2[c];
        }
        if (bounds.has_value()) {
            val[0] = std::clamp(val[0], -bounds->tau_max, bounds->tau_max);
            val[1] = std::clamp(val[1], -bounds->f_max, bounds->f_max);
        }
        return GenInput{val[0], val[1]};
    };
    // the window edges are input discontinuities
    std::vector<double> cuts = nominal.schedule.breakpoints;
    for (int c = 0; c < 2; ++c) {
        if (out.t1[c] <= 0.0) continue;
        cuts.push_back(t_i);
        cuts.push_back(t_i + out.t1[c]);
        cuts.push_back(t_i + out.t1[c] + out.t2[c]);
    }
    out.traj = integrate_fn(p, x0_perturbed, corrected, nominal.t_f, sim, cuts);
    return out;
}

CalibrationResult calibrate_correction(const SystemParams& p, const Protocol& nominal,
                                       const GridSpec& grid, const State& x0_nominal,
                                       const SimConfig& sim,
                                       const std::optional<ActuatorBounds>& bounds,
                                       int threads) {
    grid.validate();
    if (!nominal.reference)
        throw std::invalid_argument("calibrate_correction: protocol carries no reference");

    const auto open_loop = [&](const State& x0) {
        return integrate(p, x0, nominal.schedule, sim);
    };
    const RobustnessReport uncorrected =
        initial_error_grid(open_loop, x0_nominal, grid, "uncorrected", threads);
    const double e_nominal = uncorrected.nominal_energy;

    // candidate space: measurement instant, stage-ratio, strengths on a log
    // grid, and the two duration regularizers scaled by t_f
    const double tf = nominal.t_f;
    std::vector<CorrectionConfig> candidates;
    for (double ti_frac : {0.10, 0.15, 0.20, 0.25})
        for (double c1 : {1.0, 2.0, 4.0})
            for (double c2 : {0.3, 1.0, 3.0, 10.0, 30.0})
                for (double c4 : {0.3, 1.0, 3.0, 5.0, 10.0, 15.0, 30.0})
                    for (double c3_frac : {0.01, 0.05, 0.1})
                        for (double c5_frac : {0.01, 0.05, 0.1}) {
                            CorrectionConfig c;
                            c.t_i = ti_frac * tf;
                            c.c1 = c1;
                            c.c2 = c2;
                            c.c3 = c3_frac * tf;
                            c.c4 = c4;
                            c.c5 = c5_frac * tf;
                            candidates.push_back(c);
                        }

    // mean RE and tail RE (mean of the worst 5% of cells) of one candidate
    auto score_over = [&](const CorrectionConfig& c,
                          const std::vector<std::pair<double, double>>& offsets) {
        std::vector<double> res;
        res.reserve(offsets.size());
        double sum = 0.0;
        for (const auto& [dth, drr] : offsets) {
            State x0 = x0_nominal;
            x0.theta += dth;
            x0.r += drr;
            try {
                const CorrectionOutcome oc =
                    single_shot_correct(p, nominal, c, x0, nullptr, 0, sim, bounds);
                const double re = re_metric(e_nominal, oc.traj.final_energy());
                sum += re;
                res.push_back(re);
            } catch (...) {
                return std::pair{std::numeric_limits<double>::infinity(),
                                 std::numeric_limits<double>::infinity()};
            }
        }
        std::sort(res.begin(), res.end());
        const std::size_t n_tail =
            std::max<std::size_t>(1, (res.size() + 19) / 20);  // ceil(5%)
        double tail = 0.0;
        for (std::size_t i = res.size() - n_tail; i < res.size(); ++i) tail += res[i];
        return std::pair{sum / static_cast<double>(offsets.size()),
                         tail / static_cast<double>(n_tail)};
    };

    // phase 1: rank on a subsampled grid (~5 points per axis)
    std::vector<std::pair<double, double>> coarse, full;
    const int step_t = std::max(1, (grid.n_theta - 1) / 4);
    const int step_r = std::max(1, (grid.n_r - 1) / 4);
    for (std::size_t idx = 0; idx < grid.cells(); ++idx) {
        const auto off = grid.offset(idx);
        full.push_back(off);
        const int i = static_cast<int>(idx) / grid.n_r;
        const int j = static_cast<int>(idx) % grid.n_r;
        if (i % step_t == 0 && j % step_r == 0) coarse.push_back(off);
    }

    std::vector<double> coarse_mre(candidates.size());
    parallel_for(candidates.size(), threads, [&](std::size_t i) {
        coarse_mre[i] = score_over(candidates[i], coarse).first;
    });

    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return coarse_mre[a] != coarse_mre[b] ? coarse_mre[a] < coarse_mre[b] : a < b;
    });

    // phase 2: rescore the shortlist on the full grid; among configs within
    // 7% of the best MRE prefer the thinnest tail
    const std::size_t shortlist = std::min<std::size_t>(30, order.size());
    std::vector<double> full_mre(shortlist), full_max(shortlist);
    parallel_for(shortlist, threads, [&](std::size_t i) {
        const auto [m, w] = score_over(candidates[order[i]], full);
        full_mre[i] = m;
        full_max[i] = w;
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < shortlist; ++i)
        if (full_mre[i] < full_mre[best]) best = i;
    std::size_t pick = best;
    for (std::size_t i = 0; i < shortlist; ++i) {
        if (full_mre[i] <= 1.07 * full_mre[best] && full_max[i] < full_max[pick]) pick = i;
    }

    CalibrationResult res;
    res.config = candidates[order[pick]];
    res.corrected_mre = full_mre[pick];
    res.uncorrected_mre = uncorrected.mre;
    res.improved = res.corrected_mre <= res.uncorrected_mre;
    return res;
}

}  // namespace rtheta
