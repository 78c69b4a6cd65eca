#include "rtheta/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rtheta {

void InputSchedule::validate() const {
    if (times.empty()) throw std::invalid_argument("InputSchedule: empty grid");
    // a single sample at t = 0 is the degenerate zero-duration hold
    if (tau.size() != times.size() || f.size() != times.size())
        throw std::invalid_argument("InputSchedule: array length mismatch");
    if (times.front() != 0.0) throw std::invalid_argument("InputSchedule: times[0] must be 0");
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (!(times[i] < times[i + 1]))
            throw std::invalid_argument("InputSchedule: times must be strictly increasing");
    for (std::size_t i = 0; i < times.size(); ++i)
        if (!std::isfinite(times[i]) || !std::isfinite(tau[i]) || !std::isfinite(f[i]))
            throw std::invalid_argument("InputSchedule: non-finite value");
}

GenInput InputSchedule::at(double t) const {
    if (times.empty()) return GenInput{};
    if (t <= times.front()) return GenInput{tau.front(), f.front()};
    if (t >= times.back()) return GenInput{tau.back(), f.back()};
    // first index with times[hi] > t; predecessor holds the left node
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    const std::size_t lo = hi - 1;
    if (mode == InterpMode::piecewise_constant_left || times[hi] == times[lo])
        return GenInput{tau[lo], f[lo]};
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    return GenInput{tau[lo] + w * (tau[hi] - tau[lo]), f[lo] + w * (f[hi] - f[lo])};
}

InputSchedule resample_schedule(const InputSchedule& s, double max_spacing) {
    s.validate();
    if (!(max_spacing > 0.0))
        throw std::invalid_argument("resample_schedule: max_spacing must be > 0");
    const double t_end = s.t_end();
    std::vector<double> grid = s.times;
    const int n_fill = static_cast<int>(std::ceil(t_end / max_spacing));
    for (int i = 1; i < n_fill; ++i) grid.push_back(t_end * i / n_fill);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    InputSchedule out;
    out.mode = s.mode;
    out.breakpoints = s.breakpoints;
    out.times = grid;
    out.tau.reserve(grid.size());
    out.f.reserve(grid.size());
    for (double t : grid) {
        const GenInput u = s.at(t);
        out.tau.push_back(u.tau);
        out.f.push_back(u.f);
    }
    return out;
}

InputSchedule sample_schedule(const std::function<GenInput(double)>& fn, double t_f,
                              int n_samples, InterpMode mode) {
    if (n_samples < 2) throw std::invalid_argument("sample_schedule: n_samples < 2");
    if (!(t_f > 0.0)) throw std::invalid_argument("sample_schedule: t_f must be > 0");
    InputSchedule s;
    s.mode = mode;
    s.times.resize(n_samples);
    s.tau.resize(n_samples);
    s.f.resize(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double t = (i == n_samples - 1) ? t_f : t_f * i / (n_samples - 1);
        const GenInput u = fn(t);
        s.times[i] = t;
        s.tau[i] = u.tau;
        s.f[i] = u.f;
    }
    return s;
}

}  // namespace rtheta
