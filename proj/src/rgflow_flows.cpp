#include <cmath>

#include "cflow/ode.hpp"
#include "cflow/rgflow.hpp"

namespace cflow {

namespace {

cplx ipow(cplx z, int n) {
    cplx r = 1.0;
    for (int i = 0; i < n; ++i) r *= z;
    return r;
}

double parity(int N) { return (N % 2 == 0) ? 1.0 : -1.0; }

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_finite(const FlowState& s) {
    if (!finite(s.tau) || !finite(s.g_inv) || !finite(s.gamma)) throw ValidationError("flow state must be finite");
}

constexpr double blowup_bound = 1e12;

using Vec3c = Eigen::Matrix<cplx, 3, 1>;

// State (G, gamma, int G dtau) integrated along the polyline through `contour`.
// rate = dgamma/dtau / (gamma G), so gamma = gamma0 exp(rate * int G) serves as the aux check.
template <class Rhs>
Trajectory integrate_contour(const FlowState& init, const std::vector<cplx>& contour, cplx rate, Rhs&& rhs) {
    check_finite(init);
    if (contour.empty()) throw ValidationError("contour must have at least one point");
    Trajectory traj;
    const cplx t0 = contour.front();
    const cplx dir = contour.size() > 1 ? contour.back() - t0 : cplx(1.0);
    traj.contour_angle = std::abs(dir) > 0.0 ? std::arg(dir) : 0.0;
    traj.step = contour.size() > 1 ? std::abs(contour[1] - contour[0]) : 0.0;

    auto aux_of = [&](const Vec3c& y) -> cplx {
        if (init.gamma == 0.0) return y[1];
        return y[1] / (init.gamma * std::exp(rate * y[2])) - 1.0;
    };
    Vec3c y;
    y << init.g_inv, init.gamma, 0.0;
    double s = 0.0;
    traj.states.push_back({t0, y[0], y[1], aux_of(y)});
    traj.s.push_back(s);

    OdeOptions opt;
    opt.rtol = 1e-9;
    opt.atol = 1e-12;
    for (std::size_t i = 1; i < contour.size(); ++i) {
        const cplx a = contour[i - 1], d = contour[i] - a;
        if (d == 0.0) throw ValidationError("contour points must be distinct");
        opt.h_init = 1e-3;
        auto f = [&](double u, const Vec3c& v) -> Vec3c { return d * rhs(a + u * d, v); };
        auto stop = [](double, const Vec3c& v) { return !(std::abs(v[0]) <= blowup_bound); };
        OdeRun<Vec3c> run;
        try {
            run = rk4_adaptive(f, std::vector<double>{0.0, 1.0}, y, opt, stop);
        } catch (const StepSizeUnderflow&) {
            // step collapse next to a pole of G: treat as the divergence point
            throw BlowUp("step size collapsed approaching a singularity of G^{-1}", a, traj);
        }
        if (run.stopped) {
            const cplx tau_star = a + run.s_stop * d;
            throw BlowUp("|G^{-1}| exceeded 1e12", tau_star, traj);
        }
        y = run.y.back();
        s += std::abs(d);
        traj.states.push_back({contour[i], y[0], y[1], aux_of(y)});
        traj.s.push_back(s);
    }
    return traj;
}

}  // namespace

cplx tau_step_branch(cplx g_prev, cplx gamma) {
    const cplx disc = g_prev * g_prev - 4.0 * gamma * gamma;
    const double scale = std::max(std::norm(g_prev), 4.0 * std::norm(gamma));
    if (std::abs(disc) <= 1e-14 * scale) throw BranchCollision("discriminant of the G^{-1} quadratic vanishes");
    const cplx sq = std::sqrt(disc);
    const cplx r1 = 0.5 * (g_prev + sq), r2 = 0.5 * (g_prev - sq);
    return std::abs(r1 - g_prev) <= std::abs(r2 - g_prev) ? r1 : r2;
}

FlowState tau_step_recursion(const FlowState& prev) {
    check_finite(prev);
    if (prev.g_inv == 0.0) throw DivisionByZero("previous G^{-1} is zero");
    FlowState next = prev;
    next.tau = prev.tau + 1.0;
    if (prev.gamma == 0.0) return next;
    const double damp = 0.5;
    cplx g = prev.gamma;
    for (int it = 0; it < 500; ++it) {
        const cplx x = tau_step_branch(prev.g_inv, g);
        const cplx target = prev.gamma + g * g * prev.gamma / x;
        const cplx g_new = (1.0 - damp) * g + damp * target;
        if (!finite(g_new)) break;
        if (std::abs(g_new - g) <= 1e-14 * std::max(1.0, std::abs(g_new))) {
            next.gamma = g_new;
            next.g_inv = tau_step_branch(prev.g_inv, g_new);
            return next;
        }
        g = g_new;
    }
    throw NoConvergence("gamma fixed point in the tau recursion did not converge");
}

Trajectory one_loop_invariant_flow(OneLoopVariant variant, const std::vector<double>& gamma_grid, double C,
                                   bool complex_mode) {
    if (gamma_grid.empty()) throw ValidationError("gamma_grid is empty");
    for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
        if (!(gamma_grid[i] > 0.0)) throw ValidationError("gamma_grid must be positive");
        if (i > 0 && !(gamma_grid[i] > gamma_grid[i - 1])) throw ValidationError("gamma_grid must be increasing");
    }
    if (!std::isfinite(C)) throw ValidationError("C must be finite");
    Trajectory traj;
    traj.step = gamma_grid.size() > 1 ? gamma_grid[1] - gamma_grid[0] : 0.0;

    if (variant == OneLoopVariant::appendix_v2) {
        for (double g : gamma_grid) {
            const double arg = std::log(1.0 / g) + C;
            if (arg < 0.0 && !complex_mode) throw DomainError("log(1/gamma) + C < 0 in real mode");
            const cplx G = g * std::sqrt(cplx(arg, 0.0));
            traj.states.push_back({g, G, g, G * G / (g * g) - std::log(1.0 / g)});
            traj.s.push_back(g);
        }
        return traj;
    }

    // t = gamma^3 / G^2,  dt/dgamma = -3 t^{3/2} gamma^{-1/2},  C = (2/3) t^{-1/2} - 2 sqrt(gamma)
    const double g0 = gamma_grid.front();
    const double w0 = C + 2.0 * std::sqrt(g0);
    if (!(w0 > 0.0)) throw DomainError("C + 2 sqrt(gamma0) must be positive for a real t");
    const double t0 = std::pow(2.0 / (3.0 * w0), 2);
    auto rhs = [](double g, const Eigen::Matrix<double, 1, 1>& t) {
        Eigen::Matrix<double, 1, 1> d;
        d[0] = -3.0 * std::pow(t[0], 1.5) / std::sqrt(g);
        return d;
    };
    OdeOptions opt;
    opt.rtol = 1e-9;
    opt.atol = 1e-12;
    opt.h_init = 1e-4;
    Eigen::Matrix<double, 1, 1> y0;
    y0[0] = t0;
    const auto run = rk4_adaptive(rhs, gamma_grid, y0, opt);
    for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
        const double g = gamma_grid[i], t = run.y[i][0];
        if (!(t > 0.0)) throw DomainError("t left the positive axis");
        const double G = std::pow(g, 1.5) / std::sqrt(t);
        traj.states.push_back({g, G, g, 2.0 / 3.0 / std::sqrt(t) - 2.0 * std::sqrt(g)});
        traj.s.push_back(g);
    }
    return traj;
}

std::vector<cplx> ray_contour(double angle, double s_max, int steps) {
    if (steps < 1) throw ValidationError("steps must be >= 1");
    if (!(s_max > 0.0)) throw ValidationError("s_max must be positive");
    std::vector<cplx> c;
    const cplx e = std::polar(1.0, angle);
    for (int k = 0; k <= steps; ++k) c.push_back(e * (s_max * k / steps));
    return c;
}

Trajectory n_power_flow(const FlowState& init, int N, const std::vector<cplx>& contour) {
    if (N < 1) throw ValidationError("N must be >= 1");
    const double n2 = double(N) * N;
    return integrate_contour(init, contour, 1.0, [&](cplx, const Vec3c& v) {
        Vec3c d;
        d << v[0] * v[0] - n2 * ipow(v[1], 2 * N), v[1] * v[0], v[0];
        return d;
    });
}

Trajectory lr_flow(const FlowState& init, int N, double nu, const std::vector<cplx>& contour) {
    if (N < 1) throw ValidationError("N must be >= 1");
    if (!std::isfinite(nu)) throw ValidationError("nu must be finite");
    const double n2 = double(N) * N;
    const double sn = std::sin(nu / N);
    const double s2N = std::pow(sn, 2 * N);
    // N gamma^{N-1} gamma' = (-1)^N gamma^N sin^2 G  =>  gamma' = (-1)^N sin^2 gamma G / N
    const cplx rate = parity(N) * sn * sn / double(N);
    return integrate_contour(init, contour, rate, [&](cplx, const Vec3c& v) {
        Vec3c d;
        d << v[0] * v[0] - n2 * ipow(v[1], 2 * N) * s2N, rate * v[1] * v[0], v[0];
        return d;
    });
}

}  // namespace cflow
