#include "rtheta/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace rtheta {

void SystemParams::validate() const {
    if (!(m > 0.0)) throw std::invalid_argument("SystemParams: m must be > 0");
    if (!(g >= 0.0)) throw std::invalid_argument("SystemParams: g must be >= 0");
    if (!(B1 >= 0.0) || !(B2 >= 0.0))
        throw std::invalid_argument("SystemParams: damping coefficients must be >= 0");
}

Accel forward_accel(const SystemParams& p, const State& x, const GenInput& u) {
    if (!(x.r > 0.0)) throw std::domain_error("forward_accel: r must be > 0");
    const double ct = std::cos(x.theta);
    const double st = std::sin(x.theta);
    Accel a;
    a.ddtheta = (u.tau - 2.0 * p.m * x.r * x.dr * x.dtheta - p.B1 * x.dtheta -
                 p.m * p.g * x.r * ct) /
                (p.m * x.r * x.r);
    a.ddr = (u.f + p.m * x.r * x.dtheta * x.dtheta - p.B2 * x.dr - p.m * p.g * st) / p.m;
    if (!std::isfinite(a.ddtheta) || !std::isfinite(a.ddr))
        throw std::domain_error("forward_accel: non-finite acceleration");
    return a;
}

GenInput inverse_dynamics(const SystemParams& p, const KinPoint& k) {
    if (!(k.q.r > 0.0)) throw std::domain_error("inverse_dynamics: r must be > 0");
    const double ct = std::cos(k.q.theta);
    const double st = std::sin(k.q.theta);
    GenInput u;
    u.tau = p.m * k.q.r * k.q.r * k.ddq.theta + 2.0 * p.m * k.q.r * k.dq.r * k.dq.theta +
            p.B1 * k.dq.theta + p.m * p.g * k.q.r * ct;
    u.f = p.m * k.ddq.r - p.m * k.q.r * k.dq.theta * k.dq.theta + p.B2 * k.dq.r +
          p.m * p.g * st;
    return u;
}

double mechanical_energy(const SystemParams& p, const State& x) {
    return 0.5 * p.m * x.r * x.r * x.dtheta * x.dtheta + 0.5 * p.m * x.dr * x.dr +
           p.m * p.g * x.r * std::sin(x.theta);
}

double power_balance(const SystemParams& p, const State& x, const GenInput& u) {
    return -p.B1 * x.dtheta * x.dtheta - p.B2 * x.dr * x.dr + u.tau * x.dtheta +
           u.f * x.dr;
}

GenInput gravity_vector(const SystemParams& p, const Coord& q) {
    return GenInput{p.m * p.g * q.r * std::cos(q.theta), p.m * p.g * std::sin(q.theta)};
}

Mat2 linearized_stiffness(const SystemParams& p, const Coord& q_f) {
    const double mg = p.m * p.g;
    const double off = mg * std::cos(q_f.theta);
    return Mat2{{{-mg * q_f.r * std::sin(q_f.theta), off}, {off, 0.0}}};
}

std::array<double, 2> symmetric_eigenvalues(const Mat2& k) {
    const double tr = k[0][0] + k[1][1];
    const double det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return {tr / 2.0 - disc, tr / 2.0 + disc};
}

}  // namespace rtheta
