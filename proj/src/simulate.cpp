#include "rtheta/simulate.hpp"

#include <cmath>

#include "rtheta/rng.hpp"

namespace rtheta {

namespace {

struct Deriv {
    double dtheta, dr, ddtheta, ddr;
};

Deriv rhs(const SystemParams& p, const State& x, const GenInput& u) {
    const Accel a = forward_accel(p, x, u);
    return Deriv{x.dtheta, x.dr, a.ddtheta, a.ddr};
}

State advance(const State& x, const Deriv& d, double h) {
    return State{x.theta + h * d.dtheta, x.r + h * d.dr, x.dtheta + h * d.ddtheta,
                 x.dr + h * d.ddr};
}

bool valid(const State& x) {
    return x.r > 0.0 && std::isfinite(x.theta) && std::isfinite(x.r) &&
           std::isfinite(x.dtheta) && std::isfinite(x.dr);
}

void push_sample(TrajectoryRecord& rec, const SystemParams& p, double t, const State& x,
                 const GenInput& u) {
    rec.t.push_back(t);
    rec.theta.push_back(x.theta);
    rec.r.push_back(x.r);
    rec.dtheta.push_back(x.dtheta);
    rec.dr.push_back(x.dr);
    rec.tau.push_back(u.tau);
    rec.f.push_back(u.f);
    rec.E.push_back(mechanical_energy(p, x));
}

}  // namespace

TrajectoryRecord integrate_fn(const SystemParams& p, const State& x0, const InputFn& input,
                              double t_end, const SimConfig& cfg,
                              const std::vector<double>& breakpoints) {
    p.validate();
    if (!(t_end > 0.0)) throw std::invalid_argument("integrate: t_end must be > 0");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
    if (!(cfg.dt <= t_end / 10.0 * (1.0 + 1e-12)))
        throw std::invalid_argument("integrate: dt must be <= t_end/10");
    if (!(x0.r > 0.0)) throw std::domain_error("integrate: x0.r must be > 0");

    std::vector<double> cuts;  // interior breakpoints, sorted unique
    for (double b : breakpoints)
        if (b > 1e-12 && b < t_end - 1e-12) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::size_t next_cut = 0;

    TrajectoryRecord rec;
    const std::size_t expected = static_cast<std::size_t>(t_end / cfg.dt) + 2;
    rec.t.reserve(expected);
    rec.theta.reserve(expected);
    rec.r.reserve(expected);
    rec.dtheta.reserve(expected);
    rec.dr.reserve(expected);
    rec.tau.reserve(expected);
    rec.f.reserve(expected);
    rec.E.reserve(expected);

    State x = x0;
    push_sample(rec, p, 0.0, x, input(0.0));

    const std::size_t n_steps =
        static_cast<std::size_t>(std::ceil(t_end / cfg.dt - 1e-9));
    double t = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double grid_next = (k + 1 == n_steps) ? t_end : (k + 1) * cfg.dt;
        while (t < grid_next - 1e-12) {
            while (next_cut < cuts.size() && cuts[next_cut] <= t + 1e-12) ++next_cut;
            double t_next = grid_next;
            if (next_cut < cuts.size() && cuts[next_cut] < grid_next - 1e-12) {
                t_next = cuts[next_cut];
                ++next_cut;
            }
            const double h = t_next - t;
            try {
                const GenInput u0 = input(t);
                const GenInput u1 = input(t + 0.5 * h);
                const GenInput u2 = input(t_next);
                const Deriv k1 = rhs(p, x, u0);
                const Deriv k2 = rhs(p, advance(x, k1, 0.5 * h), u1);
                const Deriv k3 = rhs(p, advance(x, k2, 0.5 * h), u1);
                const Deriv k4 = rhs(p, advance(x, k3, h), u2);
                x = State{x.theta + h / 6.0 * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta),
                          x.r + h / 6.0 * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr),
                          x.dtheta + h / 6.0 * (k1.ddtheta + 2.0 * k2.ddtheta + 2.0 * k3.ddtheta + k4.ddtheta),
                          x.dr + h / 6.0 * (k1.ddr + 2.0 * k2.ddr + 2.0 * k3.ddr + k4.ddr)};
            } catch (const std::domain_error&) {
                throw SimulationAbort(t_next, std::move(rec));
            }
            if (!valid(x)) throw SimulationAbort(t_next, std::move(rec));
            push_sample(rec, p, t_next, x, input(t_next));
            t = t_next;
        }
        t = grid_next;
    }
    return rec;
}

TrajectoryRecord integrate(const SystemParams& p, const State& x0,
                           const InputSchedule& sched, const SimConfig& cfg) {
    sched.validate();
    return integrate_fn(
        p, x0, [&sched](double t) { return sched.at(t); }, sched.t_end(), cfg,
        sched.breakpoints);
}

double draw_noise(const NoiseSpec& spec, int channel, std::uint64_t seed,
                  std::uint64_t sample_index) {
    const double bound = spec.bounds[static_cast<std::size_t>(channel)];
    if (bound == 0.0) return 0.0;
    const std::uint64_t kind_tag = static_cast<std::uint64_t>(spec.kind) + 1;
    if (spec.dist == NoiseDist::uniform) {
        const double u = rng::uniform01(seed, kind_tag, channel, sample_index, 0);
        return bound * (2.0 * u - 1.0);
    }
    // Box-Muller, clamped to the stated hard range
    const double u1 =
        std::max(rng::uniform01(seed, kind_tag, channel, sample_index, 1), 1e-300);
    const double u2 = rng::uniform01(seed, kind_tag, channel, sample_index, 2);
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    const double sigma = spec.sigma_fraction * bound;
    return std::clamp(sigma * z, -bound, bound);
}

InputSchedule perturb_schedule(const InputSchedule& sched, const NoiseSpec& spec,
                               std::uint64_t seed) {
    if (spec.kind != NoiseKind::input)
        throw std::invalid_argument("perturb_schedule: spec.kind must be input");
    sched.validate();
    InputSchedule out = sched;
    for (std::size_t i = 0; i < out.times.size(); ++i) {
        out.tau[i] += draw_noise(spec, 0, seed, i);
        out.f[i] += draw_noise(spec, 1, seed, i);
    }
    return out;
}

std::array<double, 2> measure(const State& x, const NoiseSpec& spec, std::uint64_t seed,
                              std::uint64_t sample_index) {
    if (spec.kind != NoiseKind::measurement)
        throw std::invalid_argument("measure: spec.kind must be measurement");
    return {x.theta + draw_noise(spec, 0, seed, sample_index),
            x.r + draw_noise(spec, 1, seed, sample_index)};
}

}  // namespace rtheta
