#ifndef CFLOW_ODE_HPP
#define CFLOW_ODE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "cflow/errors.hpp"

namespace cflow {

using Vec2c = Eigen::Matrix<cplx, 2, 1>;
using VecXc = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

struct OdeOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h_init = 1e-3;
    double h_min = 1e-13;
};

template <class Vec>
struct OdeRun {
    std::vector<Vec> y;  // one state per grid point reached
    bool stopped = false;
    double s_stop = 0.0;
    Vec y_stop;
};

template <class Vec, class F>
Vec rk4_step(F& f, double s, const Vec& y, double h) {
    const Vec k1 = f(s, y);
    const Vec k2 = f(s + 0.5 * h, (y + 0.5 * h * k1).eval());
    const Vec k3 = f(s + 0.5 * h, (y + 0.5 * h * k2).eval());
    const Vec k4 = f(s + h, (y + h * k3).eval());
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <class Vec, class F>
Vec rk4_fixed(F&& f, double s0, double s1, Vec y, int n) {
    const double h = (s1 - s0) / n;
    for (int i = 0; i < n; ++i) y = rk4_step(f, s0 + i * h, y, h);
    return y;
}

// Classic RK4 with step-halving error control: one full step against two half
// steps, error estimate |y_half - y_full| / 15.  Output at every grid point.
// stop(s, y) returning true ends integration early (finite-time blow-up).
template <class Vec, class F, class Stop>
OdeRun<Vec> rk4_adaptive(F&& f, const std::vector<double>& grid, Vec y0, const OdeOptions& opt, Stop&& stop) {
    OdeRun<Vec> run;
    if (grid.empty()) return run;
    run.y.push_back(y0);
    double s = grid.front();
    double h = opt.h_init;
    Vec y = y0;
    for (std::size_t g = 1; g < grid.size(); ++g) {
        const double target = grid[g];
        const double dir = target >= s ? 1.0 : -1.0;
        while ((target - s) * dir > 0.0) {
            double step = std::min(h, std::fabs(target - s));
            const bool last = step == std::fabs(target - s);
            const Vec full = rk4_step(f, s, y, dir * step);
            const Vec half = rk4_step(f, s, y, 0.5 * dir * step);
            const Vec two = rk4_step(f, s + 0.5 * dir * step, half, 0.5 * dir * step);
            double err = 0.0;
            bool finite = true;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const double scale = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(two[i]));
                const double e = std::abs(two[i] - full[i]) / 15.0 / scale;
                if (!std::isfinite(e)) finite = false;
                err = std::max(err, e);
            }
            if (finite && err <= 1.0) {
                s = last ? target : s + dir * step;
                y = two;
                if (stop(s, y)) {
                    run.stopped = true;
                    run.s_stop = s;
                    run.y_stop = y;
                    return run;
                }
                const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 4.0;
                if (!last) h = step * std::min(4.0, std::max(1.0, grow));
            } else {
                const double shrink = finite ? std::max(0.1, 0.9 * std::pow(err, -0.2)) : 0.1;
                h = step * shrink;
                if (h < opt.h_min * std::max(1.0, std::fabs(s))) {
                    if (stop(s, y) || !finite) {
                        run.stopped = true;
                        run.s_stop = s;
                        run.y_stop = y;
                        return run;
                    }
                    throw StepSizeUnderflow("adaptive RK4 step fell below h_min at s = " + std::to_string(s));
                }
            }
        }
        run.y.push_back(y);
    }
    return run;
}

template <class Vec, class F>
OdeRun<Vec> rk4_adaptive(F&& f, const std::vector<double>& grid, Vec y0, const OdeOptions& opt = {}) {
    return rk4_adaptive(std::forward<F>(f), grid, std::move(y0), opt, [](double, const Vec&) { return false; });
}

}  // namespace cflow

#endif
