#include "cflow/bethe.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "cflow/ode.hpp"

namespace cflow {

namespace {

double sign_N(int N) { return (N % 2 == 0) ? 1.0 : -1.0; }

double max_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

double min_separation(const std::vector<cplx>& x) {
    double m = 1e300;
    for (std::size_t j = 0; j < x.size(); ++j)
        for (std::size_t k = j + 1; k < x.size(); ++k) m = std::min(m, std::abs(x[j] - x[k]));
    return m;
}

void check_collision(const std::vector<cplx>& x) {
    if (x.size() > 1 && min_separation(x) < 1e-9) throw CollisionError("two Bethe roots closer than 1e-9");
}

Eigen::MatrixXcd bethe_jacobian(const std::vector<cplx>& x, int N) {
    const int n = static_cast<int>(x.size());
    const double s = sign_N(N);
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        J(j, j) = 1.0;
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            const cplx d = x[j] - x[k];
            const cplx pole = 0.5 / (d * d);
            const cplx poly = N == 0 ? cplx(0.0) : s * 2.0 * double(N) * std::pow(d, 2 * N - 1);
            J(j, j) += pole - poly;
            J(j, k) = -pole + poly;
        }
    }
    return J;
}

std::vector<cplx> bethe_rhs(const std::vector<cplx>& x, int N) {
    const double s = sign_N(N);
    std::vector<cplx> r(x.size(), 0.0);
    for (std::size_t j = 0; j < x.size(); ++j)
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (k == j) continue;
            const cplx d = x[j] - x[k];
            r[j] += 0.5 / d + s * std::pow(d, 2 * N);
        }
    return r;
}

}  // namespace

std::vector<cplx> bethe_defect(const std::vector<cplx>& x, int N) {
    auto r = bethe_rhs(x, N);
    for (std::size_t j = 0; j < x.size(); ++j) r[j] = x[j] - r[j];
    return r;
}

std::vector<double> hermite_zeros(int n) {
    if (n < 1) return {};
    if (n == 1) return {0.0};
    // Golub-Welsch: H_n zeros are eigenvalues of the Jacobi matrix with off-diagonal sqrt(k/2).
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) T(k, k - 1) = T(k - 1, k) = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
    std::vector<double> z(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(z.begin(), z.end());
    return z;
}

namespace {

struct NewtonResult {
    std::vector<cplx> x;
    double residual;
    int iterations;
};

NewtonResult damped_newton(std::vector<cplx> x, int N, double tol) {
    const int n = static_cast<int>(x.size());
    const int max_iter = 500;
    double res = max_abs(bethe_defect(x, N));
    int it = 0;
    for (; it < max_iter && res >= tol; ++it) {
        const auto F = bethe_defect(x, N);
        Eigen::VectorXcd f(n);
        for (int j = 0; j < n; ++j) f[j] = F[j];
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(bethe_jacobian(x, N));
        bool improved = false;
        if (lu.isInvertible()) {
            const Eigen::VectorXcd dx = lu.solve(f);
            double lambda = 1.0;
            for (int back = 0; back < 30; ++back, lambda *= 0.5) {
                std::vector<cplx> trial(x);
                for (int j = 0; j < n; ++j) trial[j] -= lambda * dx[j];
                if (n > 1 && min_separation(trial) < 1e-9) continue;
                const double r = max_abs(bethe_defect(trial, N));
                if (std::isfinite(r) && r < res) {
                    x = std::move(trial);
                    res = r;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) {
            // fixed-point fallback x_j <- RHS_j
            auto trial = bethe_rhs(x, N);
            check_collision(trial);
            const double r = max_abs(bethe_defect(trial, N));
            if (!std::isfinite(r)) throw NoConvergence("Bethe iteration diverged");
            x = std::move(trial);
            res = r;
        }
        check_collision(x);
    }
    return {std::move(x), res, it};
}

}  // namespace

BetheRoots solve_bethe_roots(int n, int N, const std::optional<std::vector<cplx>>& init, double tol) {
    if (n < 1) throw ValidationError("n must be >= 1");
    if (N < 0) throw ValidationError("N must be >= 0");
    if (!(tol > 0.0)) throw ValidationError("tol must be positive");
    std::vector<cplx> x;
    if (init) {
        if (static_cast<int>(init->size()) != n) throw DimensionMismatch("init must hold n roots");
        x = *init;
    } else {
        for (double h : hermite_zeros(n)) x.emplace_back(h / std::sqrt(2.0), 0.0);
    }
    check_collision(x);

    NewtonResult best{x, 1e300, 0};
    try {
        best = damped_newton(x, N, tol);
    } catch (const NoConvergence&) {
    } catch (const CollisionError&) {
        if (init) throw;
    }
    // The real Hermite start only reaches real solutions; for N >= 1 and n >= 3 the
    // roots leave the real axis, so the default start is followed by seeded complex restarts.
    if (!init && !(best.residual < tol)) {
        std::mt19937_64 rng(0x5eedULL + 131ULL * n + N);
        std::normal_distribution<double> normal(0.0, 1.0);
        const int total_iter = best.iterations;
        for (int attempt = 0; attempt < 200 && !(best.residual < tol); ++attempt) {
            std::vector<cplx> start(x);
            for (auto& z : start) z += cplx(normal(rng), normal(rng));
            try {
                auto r = damped_newton(start, N, tol);
                if (r.residual < best.residual) best = std::move(r);
            } catch (const Error&) {
            }
        }
        best.iterations += total_iter;
    }
    if (!(best.residual < tol))
        throw NoConvergence("Bethe roots not converged after 500 iterations, defect " + std::to_string(best.residual));
    BetheRoots out;
    out.roots = best.x;
    out.N = N;
    out.residual = best.residual;
    out.iterations = best.iterations;
    return out;
}

cplx bethe_wavefunction(cplx x, const BetheRoots& roots) {
    const int N = roots.N;
    const double s = sign_N(N);
    cplx psi = std::exp(-0.5 * x * x);
    for (const auto& xj : roots.roots) {
        const cplx d = x - xj;
        psi *= d * std::exp(s * std::pow(d, 2 * N + 1) / double(2 * N + 1));
    }
    return psi;
}

RiccatiParams riccati_params(int N, cplx a) {
    if (N < 0) throw ValidationError("N must be >= 0");
    return {0.5 * (N + 2), cplx(sign_N(N), 0.0), a};
}

RiccatiBranch default_branch(const RiccatiParams& p) {
    return p.zeta.real() > 0.0 ? RiccatiBranch::zeta_pos : RiccatiBranch::zeta_neg;
}

namespace {

struct RiccatiArg {
    cplx lambda;  // sqrt(-zeta) or sqrt(zeta)
    cplx w;       // lambda x^q / q
    BesselKind k1, k2;
};

RiccatiArg riccati_arg(cplx x, const RiccatiParams& p, RiccatiBranch branch) {
    if (!(p.q > 0.0)) throw ValidationError("q must be positive");
    RiccatiArg r;
    if (branch == RiccatiBranch::zeta_pos) {
        r.lambda = std::sqrt(-p.zeta);
        r.k1 = BesselKind::J;
        r.k2 = BesselKind::Y;
    } else {
        r.lambda = std::sqrt(p.zeta);
        r.k1 = BesselKind::I;
        r.k2 = BesselKind::K;
    }
    r.w = r.lambda * cpow(x, p.q) / p.q;
    return r;
}

cplx bessel_prime(BesselKind kind, double nu, cplx w) {
    const cplx lower = bessel(kind, nu - 1.0, w);
    const cplx self = bessel(kind, nu, w);
    if (kind == BesselKind::K) return -lower - nu / w * self;
    return lower - nu / w * self;
}

}  // namespace

cplx riccati_u(cplx x, const RiccatiParams& p, RiccatiBranch branch) {
    if (p.a == 0.0) return 0.0;
    if (x == 0.0) throw PoleError("riccati_u is evaluated away from x = 0");
    const auto r = riccati_arg(x, p, branch);
    const double nu = 1.0 / (2.0 * p.q);
    return p.a * std::sqrt(x) * (bessel(r.k1, nu, r.w) + bessel(r.k2, nu, r.w));
}

cplx riccati_u(double x, const RiccatiParams& p, RiccatiBranch branch) {
    if (!(x > 0.0)) throw DomainError("riccati_u needs x > 0");
    return riccati_u(cplx(x, 0.0), p, branch);
}

cplx riccati_du(cplx x, const RiccatiParams& p, RiccatiBranch branch) {
    if (p.a == 0.0) return 0.0;
    if (x == 0.0) throw PoleError("riccati_du is evaluated away from x = 0");
    const auto r = riccati_arg(x, p, branch);
    const double nu = 1.0 / (2.0 * p.q);
    const cplx Z = bessel(r.k1, nu, r.w) + bessel(r.k2, nu, r.w);
    const cplx dZ = bessel_prime(r.k1, nu, r.w) + bessel_prime(r.k2, nu, r.w);
    // chain rule with dw/dx = lambda x^{q-1}
    const cplx sx = std::sqrt(x);
    return p.a * (Z / (2.0 * sx) + sx * dZ * r.lambda * cpow(x, p.q - 1.0));
}

Momentum quasi_momentum(double x, const BetheRoots& roots, const RiccatiParams& params) {
    const RiccatiBranch branch = default_branch(params);
    Momentum m;
    m.p_x = I * x;
    cplx num = 0.0, den = 0.0;
    for (const auto& xk : roots.roots) {
        const cplx d = cplx(x, 0.0) - xk;
        if (std::abs(d) < 1e-14) throw PoleError("quasi-momentum evaluated at a Bethe root");
        m.p_x += -I / d;
        num += riccati_du(d, params, branch);
        den += riccati_u(d, params, branch);
    }
    if (den == 0.0) throw PoleError("sum of Riccati solutions vanishes");
    m.p_theta = I * num / den;
    return m;
}

GpTrajectory gp_scaling_flow(double q2, const std::vector<cplx>& s_contour, cplx chi0, cplx xi0) {
    if (s_contour.empty()) throw ValidationError("empty s contour");
    GpTrajectory out;
    const double expo = q2 - 1.0;
    out.fallback = (expo == 0.0);
    auto coeff = [&](cplx s) -> cplx {
        if (out.fallback) return s;
        const cplx sp = cpow(s, expo);
        if (std::abs(sp - 1.0) < 1e-6) throw SingularFlow("contour meets s^{2q-1} = 1");
        return s / (1.0 - sp);
    };
    auto push = [&](cplx s, cplx chi) {
        GpSample g;
        g.s = s;
        g.chi_L = s.real() < 0.0 ? chi : 0.0;
        g.chi_R = s.real() < 0.0 ? 0.0 : chi;
        g.xi = xi0 * std::exp(s);
        out.samples.push_back(g);
    };
    coeff(s_contour.front());
    cplx chi = chi0;
    push(s_contour.front(), chi);
    OdeOptions opt;
    opt.rtol = 1e-10;
    opt.atol = 1e-13;
    for (std::size_t i = 1; i < s_contour.size(); ++i) {
        const cplx s0 = s_contour[i - 1], ds = s_contour[i] - s0;
        for (int j = 1; j <= 64; ++j) coeff(s0 + ds * (j / 64.0));
        auto rhs = [&](double u, const Eigen::Matrix<cplx, 1, 1>& y) {
            Eigen::Matrix<cplx, 1, 1> d;
            d[0] = ds * coeff(s0 + u * ds) * y[0];
            return d;
        };
        Eigen::Matrix<cplx, 1, 1> y0;
        y0[0] = chi;
        const auto run = rk4_adaptive(rhs, std::vector<double>{0.0, 1.0}, y0, opt);
        chi = run.y.back()[0];
        push(s_contour[i], chi);
    }
    return out;
}

}  // namespace cflow
