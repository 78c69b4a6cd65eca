#pragma once
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "rtheta/dynamics.hpp"

// Internals of the minimum-time transcription, exposed for the test suite.

namespace rtheta::detail {

using Vec4 = std::array<double, 4>;  // (theta, r, dtheta, dr)

inline Vec4 dyn(const SystemParams& p, const Vec4& x, double tau, double f) {
    const double r = x[1], w = x[2], v = x[3];
    const double ct = std::cos(x[0]), st = std::sin(x[0]);
    const double mr2 = p.m * r * r;
    return Vec4{w, v,
                (tau - 2.0 * p.m * r * v * w - p.B1 * w - p.m * p.g * r * ct) / mr2,
                (f + p.m * r * w * w - p.B2 * v - p.m * p.g * st) / p.m};
}

/// Jacobian of dyn with respect to the state.
inline void dyn_jac(const SystemParams& p, const Vec4& x, double tau, double f,
                    double A[4][4]) {
    const double r = x[1], w = x[2], v = x[3];
    const double ct = std::cos(x[0]), st = std::sin(x[0]);
    const Vec4 fx = dyn(p, x, tau, f);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) A[i][j] = 0.0;
    A[0][2] = 1.0;
    A[1][3] = 1.0;
    A[2][0] = p.g * st / r;
    A[2][1] = (-2.0 * v * w - p.g * ct) / (r * r) - 2.0 * fx[2] / r;
    A[2][2] = (-2.0 * p.m * r * v - p.B1) / (p.m * r * r);
    A[2][3] = -2.0 * w / r;
    A[3][0] = -p.g * ct;
    A[3][1] = w * w;
    A[3][2] = 2.0 * r * w;
    A[3][3] = -p.B2 / p.m;
}

inline Vec4 jac_t_mul(const double A[4][4], const Vec4& w) {  // A^T w
    Vec4 out{};
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) out[j] += A[i][j] * w[i];
    return out;
}

inline Vec4 axpy(const Vec4& a, double s, const Vec4& b) {
    return Vec4{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]};
}

inline constexpr double kRMin = 1e-2;  // rollouts below this radius are rejected

/// Transcription in normalized time: dx/dsigma = T * dyn(x, u_k) over
/// n uniform control intervals with `substeps` RK4 steps each. The decision
/// vector is z = [T, tau_hat_0..n-1, f_hat_0..n-1] with controls scaled to
/// [-1, 1].
struct Transcription {
    SystemParams p;
    Vec4 x0{};
    Vec4 xf{};
    int n = 100;
    int substeps = 4;
    double tau_max = 600.0;
    double f_max = 150.0;
    double smoothing = 0.0;

    int n_vars() const { return 1 + 2 * n; }
    int steps() const { return n * substeps; }

    double get_tau(const std::vector<double>& z, int k) const { return tau_max * z[1 + k]; }
    double get_f(const std::vector<double>& z, int k) const { return f_max * z[1 + n + k]; }

    bool rollout(const std::vector<double>& z, std::vector<Vec4>* nodes,
                 std::vector<Vec4>* stages, Vec4& x_end) const {
        const double T = z[0];
        const double h = 1.0 / steps();
        Vec4 x = x0;
        if (nodes) {
            nodes->assign(static_cast<std::size_t>(n) + 1, Vec4{});
            (*nodes)[0] = x;
        }
        if (stages) stages->assign(static_cast<std::size_t>(steps()) * 4, Vec4{});
        for (int m = 0; m < steps(); ++m) {
            const int k = m / substeps;
            const double tau = get_tau(z, k), f = get_f(z, k);
            const Vec4 y0 = x;
            const Vec4 s1 = dyn(p, y0, tau, f);
            const Vec4 ya = axpy(y0, 0.5 * h * T, s1);
            if (!(ya[1] > kRMin)) return false;
            const Vec4 s2 = dyn(p, ya, tau, f);
            const Vec4 yb = axpy(y0, 0.5 * h * T, s2);
            if (!(yb[1] > kRMin)) return false;
            const Vec4 s3 = dyn(p, yb, tau, f);
            const Vec4 yc = axpy(y0, h * T, s3);
            if (!(yc[1] > kRMin)) return false;
            const Vec4 s4 = dyn(p, yc, tau, f);
            for (int i = 0; i < 4; ++i)
                x[i] = y0[i] + h * T / 6.0 * (s1[i] + 2.0 * s2[i] + 2.0 * s3[i] + s4[i]);
            if (!(x[1] > kRMin) || !std::isfinite(x[0]) || !std::isfinite(x[1]) ||
                !std::isfinite(x[2]) || !std::isfinite(x[3]))
                return false;
            if (stages) {
                (*stages)[4 * static_cast<std::size_t>(m) + 0] = y0;
                (*stages)[4 * static_cast<std::size_t>(m) + 1] = ya;
                (*stages)[4 * static_cast<std::size_t>(m) + 2] = yb;
                (*stages)[4 * static_cast<std::size_t>(m) + 3] = yc;
            }
            if (nodes && (m + 1) % substeps == 0) (*nodes)[(m + 1) / substeps] = x;
        }
        x_end = x;
        return true;
    }

    Vec4 constraints(const std::vector<double>& z) const {
        Vec4 x_end;
        if (!rollout(z, nullptr, nullptr, x_end)) return Vec4{1e6, 1e6, 1e6, 1e6};
        return Vec4{x_end[0] - xf[0], x_end[1] - xf[1], x_end[2] - xf[2], x_end[3] - xf[3]};
    }

    double smoothing_cost(const std::vector<double>& z) const {
        if (smoothing <= 0.0) return 0.0;
        double s = 0.0;
        for (int k = 0; k + 1 < n; ++k) {
            const double dt_ = z[1 + k + 1] - z[1 + k];
            const double df_ = z[1 + n + k + 1] - z[1 + n + k];
            s += dt_ * dt_ + df_ * df_;
        }
        return smoothing * s;
    }

    /// augmented-Lagrangian value; +inf when the rollout leaves the domain
    double value(const std::vector<double>& z, const Vec4& lam, double mu) const {
        Vec4 x_end;
        if (!rollout(z, nullptr, nullptr, x_end))
            return std::numeric_limits<double>::infinity();
        double val = z[0] + smoothing_cost(z);
        for (int i = 0; i < 4; ++i) {
            const double c = x_end[i] - xf[i];
            val += lam[i] * c + 0.5 * mu * c * c;
        }
        return val;
    }

    /// value plus the exact gradient from a reverse sweep over the cached
    /// RK4 stages
    double value_grad(const std::vector<double>& z, const Vec4& lam, double mu,
                      std::vector<double>& grad) const {
        grad.assign(static_cast<std::size_t>(n_vars()), 0.0);
        std::vector<Vec4> stages;
        Vec4 x_end;
        if (!rollout(z, nullptr, &stages, x_end))
            return std::numeric_limits<double>::infinity();

        const double T = z[0];
        const double h = 1.0 / steps();
        double val = z[0] + smoothing_cost(z);
        Vec4 lam_x{};
        for (int i = 0; i < 4; ++i) {
            const double c = x_end[i] - xf[i];
            val += lam[i] * c + 0.5 * mu * c * c;
            lam_x[i] = lam[i] + mu * c;
        }

        double dT = 1.0;
        double A[4][4];
        for (int m = steps() - 1; m >= 0; --m) {
            const int k = m / substeps;
            const double tau = get_tau(z, k), f = get_f(z, k);
            const Vec4& y0 = stages[4 * static_cast<std::size_t>(m) + 0];
            const Vec4& ya = stages[4 * static_cast<std::size_t>(m) + 1];
            const Vec4& yb = stages[4 * static_cast<std::size_t>(m) + 2];
            const Vec4& yc = stages[4 * static_cast<std::size_t>(m) + 3];

            Vec4 w1, w2, w3, w4;
            for (int i = 0; i < 4; ++i) w4[i] = h / 6.0 * lam_x[i];
            dyn_jac(p, yc, tau, f, A);
            const Vec4 gtw4 = jac_t_mul(A, w4);
            for (int i = 0; i < 4; ++i) w3[i] = h / 3.0 * lam_x[i] + h * T * gtw4[i];
            dyn_jac(p, yb, tau, f, A);
            const Vec4 gtw3 = jac_t_mul(A, w3);
            for (int i = 0; i < 4; ++i) w2[i] = h / 3.0 * lam_x[i] + 0.5 * h * T * gtw3[i];
            dyn_jac(p, ya, tau, f, A);
            const Vec4 gtw2 = jac_t_mul(A, w2);
            for (int i = 0; i < 4; ++i) w1[i] = h / 6.0 * lam_x[i] + 0.5 * h * T * gtw2[i];
            dyn_jac(p, y0, tau, f, A);
            const Vec4 gtw1 = jac_t_mul(A, w1);

            double du_tau = 0.0, du_f = 0.0;
            const Vec4* ys[4] = {&y0, &ya, &yb, &yc};
            const Vec4* ws[4] = {&w1, &w2, &w3, &w4};
            for (int s = 0; s < 4; ++s) {
                const Vec4 fval = dyn(p, *ys[s], tau, f);
                const Vec4& w = *ws[s];
                for (int i = 0; i < 4; ++i) dT += fval[i] * w[i];
                du_tau += T * w[2] / (p.m * (*ys[s])[1] * (*ys[s])[1]);
                du_f += T * w[3] / p.m;
            }
            grad[static_cast<std::size_t>(1 + k)] += tau_max * du_tau;
            grad[static_cast<std::size_t>(1 + n + k)] += f_max * du_f;

            for (int i = 0; i < 4; ++i)
                lam_x[i] += T * (gtw1[i] + gtw2[i] + gtw3[i] + gtw4[i]);
        }
        grad[0] = dT;

        if (smoothing > 0.0) {
            for (int k = 0; k + 1 < n; ++k) {
                for (int off : {1, 1 + n}) {
                    const double d = z[static_cast<std::size_t>(off + k + 1)] -
                                     z[static_cast<std::size_t>(off + k)];
                    grad[static_cast<std::size_t>(off + k + 1)] += 2.0 * smoothing * d;
                    grad[static_cast<std::size_t>(off + k)] -= 2.0 * smoothing * d;
                }
            }
        }
        return val;
    }
};

}  // namespace rtheta::detail
