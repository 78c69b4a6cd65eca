#include "rtheta/trajectories.hpp"

#include <cmath>
#include <stdexcept>

#include "rtheta/errors.hpp"

namespace rtheta {

ShapeVals shape_eval(PolyOrder order, double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("shape_eval: s outside [0,1]");
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    if (order == PolyOrder::quintic) {
        return ShapeVals{6.0 * s5 - 15.0 * s4 + 10.0 * s3,
                         30.0 * (s4 - 2.0 * s3 + s2),
                         60.0 * (2.0 * s3 - 3.0 * s2 + s)};
    }
    const double s6 = s5 * s, s7 = s6 * s;
    return ShapeVals{20.0 * s7 - 76.0 * s6 + 114.0 * s5 - 83.0 * s4 + 26.0 * s3,
                     140.0 * s6 - 456.0 * s5 + 570.0 * s4 - 332.0 * s3 + 78.0 * s2,
                     840.0 * s5 - 2280.0 * s4 + 2280.0 * s3 - 996.0 * s2 + 156.0 * s};
}

KinPoint PolynomialProfile::eval(double t) const {
    if (!(t_f > 0.0)) throw std::domain_error("PolynomialProfile: t_f must be > 0");
    if (!(t >= 0.0 && t <= t_f * (1.0 + 1e-12)))
        throw std::domain_error("PolynomialProfile::eval: t outside [0, t_f]");
    const double s = std::min(t / t_f, 1.0);
    const ShapeVals sv = shape_eval(order, s);
    const double d_theta = qf.theta - q0.theta;
    const double d_r = qf.r - q0.r;
    KinPoint k;
    k.q = {q0.theta + d_theta * sv.sigma, q0.r + d_r * sv.sigma};
    k.dq = {d_theta * sv.dsigma / t_f, d_r * sv.dsigma / t_f};
    k.ddq = {d_theta * sv.ddsigma / (t_f * t_f), d_r * sv.ddsigma / (t_f * t_f)};
    return k;
}

void TrapezoidProfile::eval(double t, double& x, double& v, double& acc) const {
    const double sgn = (d < 0.0) ? -1.0 : 1.0;
    const double ad = std::abs(d);
    double xu, vu, au;  // unsigned kinematics on |d|
    if (t <= 0.0) {
        // one-sided limit: the acceleration phase starts at t = 0
        xu = vu = 0.0;
        au = (t_acc > 0.0) ? a : 0.0;
    } else if (t < t_acc) {
        au = a;
        vu = a * t;
        xu = 0.5 * a * t * t;
    } else if (t < t_acc + t_coast) {
        const double tc = t - t_acc;
        au = 0.0;
        vu = v_coast;
        xu = 0.5 * a * t_acc * t_acc + v_coast * tc;
    } else if (t < total_time()) {
        const double td = t - t_acc - t_coast;
        au = -a;
        vu = v_coast - a * td;
        xu = 0.5 * a * t_acc * t_acc + v_coast * t_coast + v_coast * td - 0.5 * a * td * td;
    } else {
        au = 0.0;
        vu = 0.0;
        xu = ad;
    }
    x = sgn * xu;
    v = sgn * vu;
    acc = sgn * au;
}

TrapezoidProfile trapezoid_min_time(double d, double v_max, double a_max) {
    if (!(v_max > 0.0) || !(a_max > 0.0))
        throw std::invalid_argument("trapezoid_min_time: bounds must be > 0");
    TrapezoidProfile p;
    p.d = d;
    const double ad = std::abs(d);
    if (ad == 0.0) return p;  // zero-duration profile
    p.a = a_max;
    if (ad < v_max * v_max / a_max) {
        // triangular: the velocity bound is never reached
        p.v_coast = std::sqrt(ad * a_max);
        p.t_acc = p.t_dec = p.v_coast / a_max;
        p.t_coast = 0.0;
    } else {
        p.v_coast = v_max;
        p.t_acc = p.t_dec = v_max / a_max;
        p.t_coast = (ad - v_max * v_max / a_max) / v_max;
    }
    return p;
}

TrapezoidProfile stretch_to_duration(const TrapezoidProfile& prof, double target_duration) {
    const double total = prof.total_time();
    if (target_duration < total - 1e-12)
        throw InfeasibleError("stretch_to_duration: target shorter than profile duration");
    if (target_duration <= total + 1e-12) return prof;

    TrapezoidProfile p = prof;
    const double ad = std::abs(prof.d);
    if (ad == 0.0) {
        // no displacement: coast in place for the requested duration
        p.a = 0.0;
        p.v_coast = 0.0;
        p.t_acc = p.t_dec = 0.0;
        p.t_coast = target_duration;
        return p;
    }
    // Total time as a function of coast speed v (acceleration unchanged):
    //   T(v) = v/a + |d|/v,  so  v^2 - a T v + a |d| = 0.
    // The smaller root is the admissible one (v below the triangular peak).
    const double a = prof.a;
    const double disc = a * a * target_duration * target_duration - 4.0 * a * ad;
    if (disc < 0.0)
        throw InfeasibleError("stretch_to_duration: no admissible coast velocity");
    const double v = (a * target_duration - std::sqrt(disc)) / 2.0;
    p.v_coast = v;
    p.t_acc = p.t_dec = v / a;
    p.t_coast = target_duration - 2.0 * v / a;
    return p;
}

TrapezoidProfile synchronize_profiles(const TrapezoidProfile& slow,
                                      const TrapezoidProfile& fast) {
    if (slow.total_time() < fast.total_time() - 1e-12)
        throw InfeasibleError("synchronize_profiles: slow profile ends before fast one");
    return stretch_to_duration(fast, slow.total_time());
}

}  // namespace rtheta
