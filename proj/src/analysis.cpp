#include "cflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cflow {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

double point_segment_distance(cplx p, cplx a, cplx b, double& u) {
    const cplx d = b - a;
    const double len2 = std::norm(d);
    u = len2 > 0.0 ? std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0) : 0.0;
    return std::abs(p - (a + u * d));
}

double winding_about(const std::vector<cplx>& pts, cplx c) {
    double total = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const cplx a = pts[i - 1] - c, b = pts[i] - c;
        if (a == 0.0 || b == 0.0) continue;
        total += std::arg(b / a);
    }
    return total / (2.0 * pi);
}

}  // namespace

CycleReport detect_limit_cycle(const std::vector<cplx>& traj, double tol) {
    if (traj.size() < 8) throw ValidationError("trajectory needs at least 8 points");
    if (!(tol > 0.0)) throw ValidationError("tol must be positive");
    for (const auto& z : traj)
        if (!finite(z)) throw ValidationError("trajectory contains non-finite points");
    const cplx z0 = traj.front();
    std::size_t far = 0;
    double far_d = 0.0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const double d = std::abs(traj[i] - z0);
        if (d > far_d) {
            far_d = d;
            far = i;
        }
    }
    if (far_d == 0.0) throw DegenerateTrajectory("all trajectory points coincide");

    // nearest return to the start, measured against the polyline after the farthest point
    CycleReport rep;
    double best = std::abs(traj.back() - z0), best_u = 0.0;
    std::size_t best_i = traj.size() - 1;
    for (std::size_t i = far; i + 1 < traj.size(); ++i) {
        double u;
        const double d = point_segment_distance(z0, traj[i], traj[i + 1], u);
        if (d < best) {
            best = d;
            best_i = i;
            best_u = u;
        }
    }
    rep.min_return_distance = best;
    rep.period_estimate = double(best_i) + best_u;

    std::vector<cplx> loop;
    if (best < tol) {
        loop.assign(traj.begin(), traj.begin() + best_i + 1);
        if (best_i + 1 < traj.size()) loop.push_back(traj[best_i] + best_u * (traj[best_i + 1] - traj[best_i]));
        loop.push_back(z0);
    } else {
        loop = traj;
    }
    cplx c = 0.0;
    const std::size_t nc = best < tol ? best_i + 1 : traj.size();
    for (std::size_t i = 0; i < nc; ++i) c += traj[i];
    c /= double(nc);
    rep.winding_raw = winding_about(loop, c);
    rep.winding = int(std::lround(rep.winding_raw));
    rep.closed = best < tol && rep.winding != 0 && std::fabs(rep.winding_raw - rep.winding) < 1e-3;

    if (!rep.closed) {
        bool ok = true;
        for (const auto& z : traj) ok = ok && z != 0.0;
        if (ok) {
            std::vector<std::pair<double, double>> pts;
            double theta = std::arg(traj.front());
            pts.emplace_back(theta, std::abs(traj.front()));
            for (std::size_t i = 1; i < traj.size(); ++i) {
                theta += std::arg(traj[i] / traj[i - 1]);
                pts.emplace_back(theta, std::abs(traj[i]));
            }
            const auto fit = spiral_invariant_fit(pts);
            rep.spiral_c = fit.c;
            rep.spiral_residual = fit.residual;
        }
    }
    return rep;
}

double enclosed_area(const std::vector<cplx>& traj) {
    double a = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const cplx p = traj[i], q = traj[(i + 1) % traj.size()];
        a += p.real() * q.imag() - q.real() * p.imag();
    }
    return 0.5 * a;
}

SpiralFit spiral_invariant_fit(const std::vector<std::pair<double, double>>& theta_t) {
    if (theta_t.empty()) throw ValidationError("no points to fit");
    double mean = 0.0;
    for (const auto& [th, t] : theta_t) {
        if (!(t > 0.0)) throw DomainError("spiral fit needs t > 0");
        mean += std::log(t) + th;
    }
    mean /= double(theta_t.size());
    double ss = 0.0;
    for (const auto& [th, t] : theta_t) {
        const double r = std::log(t) + th - mean;
        ss += r * r;
    }
    return {std::exp(mean), std::sqrt(ss / double(theta_t.size()))};
}

double coupling_angle_slope(double g, double theta, int n) {
    const double gn = std::pow(g, n);
    const double d1 = gn * std::cos(n * theta) - 1.0;
    const double d2 = g * std::cos(theta) - 1.0;
    if (std::fabs(d1) < 1e-14) throw PoleError("g^n cos(n theta) = 1");
    if (std::fabs(d2) < 1e-14) throw PoleError("g cos(theta) = 1");
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign * std::tan(2.0 * theta + std::atan(gn * std::sin(n * theta) / d1) + std::atan(g * std::sin(theta) / d2));
}

namespace {

// Unit field along the integral curves of dx/dy = slope.  The atan2 branch keeps
// the angle continuous across d1 = 0 and d2 = 0; tan is unchanged.
cplx portrait_field(int n, cplx z) {
    const double g = std::abs(z), th = std::arg(z);
    const double gn = std::pow(g, n);
    const double phi = 2.0 * th + std::atan2(gn * std::sin(n * th), gn * std::cos(n * th) - 1.0) +
                       std::atan2(g * std::sin(th), g * std::cos(th) - 1.0);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return {sign * std::sin(phi), std::cos(phi)};
}

std::vector<cplx> portrait_singular_points(int n) {
    std::vector<cplx> s{0.0, 1.0};
    for (int k = 1; k < n; ++k) s.push_back(std::polar(1.0, 2.0 * pi * k / n));
    return s;
}

std::vector<cplx> trace(int n, cplx z0, double dir, const PortraitOptions& opt) {
    const auto sing = portrait_singular_points(n);
    std::vector<cplx> pts{z0};
    cplx z = z0;
    const double h = dir * opt.h;
    const long steps = long(opt.max_length / opt.h);
    for (long i = 0; i < steps; ++i) {
        const cplx k1 = portrait_field(n, z);
        const cplx k2 = portrait_field(n, z + 0.5 * h * k1);
        const cplx k3 = portrait_field(n, z + 0.5 * h * k2);
        const cplx k4 = portrait_field(n, z + h * k3);
        z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        pts.push_back(z);
        if (std::abs(z) > opt.box) break;
        bool near = false;
        for (const auto& s : sing) near = near || std::abs(z - s) < opt.stop_radius;
        if (near) break;
    }
    return pts;
}

}  // namespace

std::vector<cplx> coupling_portrait_orbit(int n, cplx z0, const PortraitOptions& opt) {
    if (n < 1) throw ValidationError("n must be >= 1");
    if (!(opt.h > 0.0) || !(opt.max_length > 0.0)) throw ValidationError("portrait step and length must be positive");
    auto back = trace(n, z0, -1.0, opt);
    const auto fwd = trace(n, z0, 1.0, opt);
    std::reverse(back.begin(), back.end());
    back.insert(back.end(), fwd.begin() + 1, fwd.end());
    return back;
}

std::vector<cplx> portrait_start_grid() { return {-0.3, -0.2, -0.1, 0.1, 0.2, 0.3, 0.7, 1.3}; }

int count_closed_portrait_orbits(int n, double tol, const PortraitOptions& opt) {
    int closed = 0;
    for (const auto& z0 : portrait_start_grid())
        if (detect_limit_cycle(coupling_portrait_orbit(n, z0, opt), tol).closed) ++closed;
    return closed;
}

cplx spectrum_variance(const std::vector<cplx>& eigs) {
    if (eigs.empty()) throw ValidationError("spectrum is empty");
    cplx s1 = 0.0, s2 = 0.0;
    for (const auto& l : eigs) {
        s1 += l;
        s2 += l * l;
    }
    return s2 - s1 * s1;
}

Contraction c_flow_contraction(const std::vector<double>& betas, const Eigen::MatrixXd& metric) {
    const Eigen::Index n = Eigen::Index(betas.size());
    if (metric.rows() != metric.cols()) throw DimensionMismatch("metric must be square");
    if (metric.rows() != n) throw DimensionMismatch("metric dimension differs from the number of betas");
    const Eigen::Map<const Eigen::VectorXd> b(betas.data(), n);
    Contraction c;
    c.value = -12.0 * b.dot(metric * b);
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (metric + metric.transpose()));
    c.metric_positive_definite = n > 0 && llt.info() == Eigen::Success;
    return c;
}

namespace {

double matsubara_log(double gamma, double C) {
    if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
    if (!(C > 0.0)) throw ValidationError("C must be positive");
    return std::log(C / gamma);
}

}  // namespace

cplx matsubara_nb(double gamma, double C) { return gamma * std::sqrt(cplx(matsubara_log(gamma, C), 0.0)); }

cplx matsubara_tb(double gamma, double C, double E) {
    const double L = matsubara_log(gamma, C);
    if (L == 0.0) throw PoleError("log(C/gamma) = 0");
    const double r = gamma / L;
    if (r == 1.0) throw PoleError("gamma / log(C/gamma) = 1");
    return E / (2.0 * pi * std::log(cplx(1.0 - r, 0.0)));
}

cplx matsubara_tau(double gamma, double C) { return std::sqrt(pi) * erfi(matsubara_log(gamma, C)); }

MatsubaraScale matsubara_scale(double gamma, double C, double E) {
    MatsubaraScale m;
    const double L = matsubara_log(gamma, C);
    m.n_B = matsubara_nb(gamma, C);
    m.T_B = matsubara_tb(gamma, C, E);
    m.tau = matsubara_tau(gamma, C);
    m.complex_branch = L < 0.0 || 1.0 - gamma / L < 0.0;
    return m;
}

cplx matsubara_propagator_sum(double E0, const PhaseScanOptions& opt) {
    if (opt.n_max < 1) throw ValidationError("n_max must be >= 1");
    if (!(opt.beta_T > 0.0)) throw ValidationError("beta_T must be positive");
    if (E0 == 0.0) throw PoleError("E0 = 0 hits the zero Matsubara mode");
    cplx s = 0.0;
    for (int m = opt.n_max; m >= 1; --m) {
        const double w = 2.0 * pi * m / opt.beta_T;
        s += 2.0 * E0 / (E0 * E0 + w * w);  // +m and -m together
    }
    s += 1.0 / E0;
    // sum_{m > M} 2 E0 / (2 pi m / beta)^2 ~ 2 E0 (beta / 2 pi)^2 / (M + 1/2)
    const double a = opt.beta_T / (2.0 * pi);
    s += 2.0 * E0 * a * a / (opt.n_max + 0.5);
    return s;
}

cplx phase_g_inv(double N, double gamma, double E0, double nu, const PhaseScanOptions& opt) {
    if (!(N > 0.0)) throw ValidationError("N must be positive");
    const double s = std::sin(nu / N);
    const cplx S = matsubara_propagator_sum(E0, opt);
    return E0 * s * s - N * N * std::pow(gamma, 2.0 * N) * cpow(cplx(s, 0.0), 2.0 * N) * S;
}

cplx lr_beta_real_N(cplx g_inv, cplx k, double N) {
    if (!(N > 0.0)) throw ValidationError("N must be positive");
    if (k == 0.0) throw PoleError("k = 0 in the LR scale");
    if (g_inv == 0.0) return 0.0;
    const cplx z = -cpow(g_inv, 2.0 * N + 2.0) / k;
    const cplx F = hyp2f1(1.0, (2 * N + 1) / (2 * N + 2), (4 * N + 3) / (2 * N + 2), z);
    return -cpow(g_inv, 2.0 * N + 1.0) * F / (k * (2.0 * N + 1.0));
}

std::vector<PhasePoint> phase_diagram_scan(const std::vector<double>& N_values, double gamma, double E0, cplx k,
                                           double nu, const PhaseScanOptions& opt) {
    if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
    if (!(E0 > 0.0)) throw ValidationError("E0 must be positive");
    if (!std::isfinite(nu) || nu == 0.0) throw ValidationError("nu must be finite and nonzero");
    if (opt.branch_points < 3) throw ValidationError("branch_points must be >= 3");
    std::vector<PhasePoint> out;
    for (double N : N_values) {
        if (!(N > 0.0)) throw ValidationError("N values must be positive");
        PhasePoint p;
        p.N = N;
        p.critical = N == std::round(N);
        p.g_inv = phase_g_inv(N, gamma, E0, nu, opt);
        try {
            p.beta = lr_beta_real_N(p.g_inv, k, N);
            const double n = N;
            p.gamma_tilde = p.beta * cpow(k, 1.0 / (2 * n)) * std::pow(n, -(2 * n + 2) / (2 * n)) /
                            std::sqrt(cplx(std::sin(nu / n), 0.0));
            p.scale = std::abs(p.beta);
            p.divergent = !std::isfinite(p.scale);
        } catch (const Error&) {
            p.divergent = true;
        }
        if (p.divergent) p.scale = std::numeric_limits<double>::infinity();
        p.complex_branch = p.g_inv.real() < 0.0 || std::fabs(p.g_inv.imag()) > 1e-12 * std::abs(p.g_inv) ||
                           std::fabs(p.beta.imag()) > 1e-12 * std::abs(p.beta);

        if (p.critical && !p.divergent) {
            // branch: halve nu in quarter-octaves, fit |beta| against G~^{-1}
            std::vector<double> xs, ys;
            bool usable = true;
            for (int j = 0; j < opt.branch_points && usable; ++j) {
                const double nj = nu * std::pow(2.0, -0.25 * j);
                const cplx g = phase_g_inv(N, gamma, E0, nj, opt);
                if (!(g.real() > 0.0) || std::fabs(g.imag()) > 1e-12 * std::abs(g)) {
                    usable = false;
                    break;
                }
                try {
                    const double b = std::abs(lr_beta_real_N(g, k, N));
                    if (!(b > 0.0) || !std::isfinite(b)) usable = false;
                    xs.push_back(g.real());
                    ys.push_back(b);
                } catch (const Error&) {
                    usable = false;
                }
            }
            if (usable) {
                const auto fit = power_law_fit(xs, ys);
                p.exponent_fit = fit.exponent;
                p.fit_r2 = fit.r2;
                std::vector<std::size_t> idx(xs.size());
                for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
                std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
                bool mono = true;
                for (std::size_t i = 1; i < idx.size(); ++i) mono = mono && ys[idx[i]] > ys[idx[i - 1]];
                p.branch_monotone = mono;
            }
        }
        out.push_back(p);
    }
    return out;
}

PowerLaw power_law_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw DimensionMismatch("xs and ys differ in length");
    if (xs.size() < 3) throw ValidationError("power-law fit needs at least 3 points");
    const std::size_t n = xs.size();
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw DomainError("power-law fit needs positive data");
        A(i, 0) = std::log(xs[i]);
        A(i, 1) = 1.0;
        b[i] = std::log(ys[i]);
    }
    const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
    const double mean = b.mean();
    const double ss_tot = (b.array() - mean).square().sum();
    const double ss_res = (A * c - b).squaredNorm();
    PowerLaw f;
    f.exponent = c[0];
    f.prefactor = std::exp(c[1]);
    f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return f;
}

double wavefn_z_relation(double z_r) { return std::exp(z_r); }

double wavefn_z_derivative(double z_r) { return std::exp(z_r); }

double wavefn_z_printed_slope(double z_r, double z_l) { return std::exp(z_r + z_l) / std::exp(z_l - z_r); }

}  // namespace cflow
