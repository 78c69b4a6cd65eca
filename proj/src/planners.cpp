#include "rtheta/planners.hpp"

#include <algorithm>
#include <cmath>

namespace rtheta {

const char* to_string(ProtocolLabel label) {
    switch (label) {
        case ProtocolLabel::sta_quintic: return "sta_quintic";
        case ProtocolLabel::sta_seventh: return "sta_seventh";
        case ProtocolLabel::constraint_limited: return "constraint_limited";
        case ProtocolLabel::time_optimal: return "time_optimal";
        case ProtocolLabel::pid: return "pid";
        case ProtocolLabel::sta_corrected: return "sta_corrected";
    }
    return "unknown";
}

ProtocolLabel protocol_label_from_string(const std::string& s) {
    for (auto label : {ProtocolLabel::sta_quintic, ProtocolLabel::sta_seventh,
                       ProtocolLabel::constraint_limited, ProtocolLabel::time_optimal,
                       ProtocolLabel::pid, ProtocolLabel::sta_corrected})
        if (s == to_string(label)) return label;
    throw std::invalid_argument("unknown protocol label: " + s);
}

Protocol sta_inputs(const SystemParams& p, const PolynomialProfile& profile,
                    int n_samples) {
    if (n_samples < 100) throw std::invalid_argument("sta_inputs: n_samples must be >= 100");
    p.validate();
    Protocol proto;
    proto.label = (profile.order == PolyOrder::quintic) ? ProtocolLabel::sta_quintic
                                                        : ProtocolLabel::sta_seventh;
    proto.t_f = profile.t_f;
    proto.reference = [profile](double t) { return profile.eval(t); };
    proto.schedule = sample_schedule(
        [&p, &profile](double t) { return inverse_dynamics(p, profile.eval(t)); },
        profile.t_f, n_samples, InterpMode::piecewise_linear);
    return proto;
}

namespace {

// peak-input feasibility of the polynomial protocol at duration t_f
bool sta_feasible(const SystemParams& p, PolyOrder order, const Coord& q0, const Coord& qf,
                  const ActuatorBounds& bounds, double t_f, int n_probe = 4001) {
    const PolynomialProfile prof{order, q0, qf, t_f};
    for (int i = 0; i < n_probe; ++i) {
        const double t = t_f * i / (n_probe - 1);
        const GenInput u = inverse_dynamics(p, prof.eval(t));
        if (std::abs(u.tau) > bounds.tau_max || std::abs(u.f) > bounds.f_max) return false;
    }
    return true;
}

}  // namespace

double min_feasible_tf(const SystemParams& p, PolyOrder order, const Coord& q0,
                       const Coord& qf, const ActuatorBounds& bounds, double tol,
                       const Bracket& bracket) {
    if (!(tol > 0.0)) throw std::invalid_argument("min_feasible_tf: tol must be > 0");
    p.validate();
    // endpoints are rest points: the static inputs there must already fit
    for (const Coord& q : {q0, qf}) {
        const GenInput u = gravity_vector(p, q);
        if (std::abs(u.tau) > bounds.tau_max || std::abs(u.f) > bounds.f_max)
            throw InfeasibleError("min_feasible_tf: endpoint gravity load exceeds bounds");
    }

    std::vector<std::pair<double, bool>> scan;
    scan.reserve(50);
    int first_feasible = -1;
    for (int i = 0; i < 50; ++i) {
        const double tf = bracket.lo + (bracket.hi - bracket.lo) * i / 49.0;
        const bool ok = sta_feasible(p, order, q0, qf, bounds, tf);
        scan.emplace_back(tf, ok);
        if (ok && first_feasible < 0) first_feasible = i;
    }
    if (first_feasible < 0)
        throw InfeasibleError("min_feasible_tf: no feasible duration in the bracket");
    for (int i = first_feasible; i < 50; ++i)
        if (!scan[static_cast<std::size_t>(i)].second) throw NonMonotoneFeasibility(scan);
    if (first_feasible == 0) return bracket.lo;  // everything feasible

    double lo = scan[static_cast<std::size_t>(first_feasible - 1)].first;  // infeasible
    double hi = scan[static_cast<std::size_t>(first_feasible)].first;      // feasible
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (sta_feasible(p, order, q0, qf, bounds, mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

KinPoint TrapezoidPair::eval(double t) const {
    double xt, vt, at, xr, vr, ar;
    theta.eval(t, xt, vt, at);
    r.eval(t, xr, vr, ar);
    KinPoint k;
    k.q = {q0.theta + xt, q0.r + xr};
    k.dq = {vt, vr};
    k.ddq = {at, ar};
    return k;
}

TrapezoidPair plan_trapezoid_pair(const Coord& q0, const Coord& qf,
                                  const KinematicBounds& kb) {
    TrapezoidPair pair;
    pair.q0 = q0;
    pair.theta = trapezoid_min_time(qf.theta - q0.theta, kb.dtheta_max, kb.ddtheta_max);
    pair.r = trapezoid_min_time(qf.r - q0.r, kb.dr_max, kb.ddr_max);
    const double t_theta = pair.theta.total_time();
    const double t_r = pair.r.total_time();
    if (t_theta >= t_r)
        pair.r = synchronize_profiles(pair.theta, pair.r);
    else
        pair.theta = synchronize_profiles(pair.r, pair.theta);
    pair.t_f = std::max(t_theta, t_r);
    return pair;
}

Protocol constraint_limited_protocol(const SystemParams& p, const Coord& q0,
                                     const Coord& qf, const KinematicBounds& kb,
                                     int n_samples) {
    p.validate();
    if (n_samples < 100)
        throw std::invalid_argument("constraint_limited_protocol: n_samples must be >= 100");
    Protocol proto;
    proto.label = ProtocolLabel::constraint_limited;

    if (qf.theta == q0.theta && qf.r == q0.r) {
        // zero-duration hold at the (shared) endpoint
        const GenInput u = gravity_vector(p, q0);
        proto.t_f = 0.0;
        proto.schedule.times = {0.0};
        proto.schedule.tau = {u.tau};
        proto.schedule.f = {u.f};
        proto.reference = [q0](double) {
            return KinPoint{q0, {0.0, 0.0}, {0.0, 0.0}};
        };
        return proto;
    }

    const TrapezoidPair pair = plan_trapezoid_pair(q0, qf, kb);
    proto.t_f = pair.t_f;
    proto.reference = [pair](double t) { return pair.eval(t); };

    // dense uniform grid plus node pairs straddling each acceleration switch,
    // so the piecewise-linear schedule reproduces the input discontinuities;
    // the switch nodes are also declared as integrator breakpoints
    std::vector<double> grid;
    std::vector<double> cuts;
    grid.reserve(static_cast<std::size_t>(n_samples) + 16);
    for (int i = 0; i < n_samples; ++i) grid.push_back(pair.t_f * i / (n_samples - 1));
    const double eps = 1e-9 * pair.t_f;
    for (const TrapezoidProfile* prof : {&pair.theta, &pair.r}) {
        for (double ts : {prof->t_acc, prof->t_acc + prof->t_coast}) {
            if (ts > eps && ts < pair.t_f - eps) {
                grid.push_back(ts - eps);
                grid.push_back(ts + eps);
                cuts.push_back(ts - eps);
                cuts.push_back(ts + eps);
            }
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    InputSchedule sched;
    sched.mode = InterpMode::piecewise_linear;
    sched.breakpoints = cuts;
    sched.times = grid;
    sched.tau.reserve(grid.size());
    sched.f.reserve(grid.size());
    for (double t : grid) {
        const GenInput u = inverse_dynamics(p, pair.eval(t));
        sched.tau.push_back(u.tau);
        sched.f.push_back(u.f);
    }
    proto.schedule = std::move(sched);
    return proto;
}

}  // namespace rtheta
