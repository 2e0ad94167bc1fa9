#include <cmath>
#include <numeric>

#include "cflow/rgflow.hpp"

namespace cflow {

namespace {

cplx ipow(cplx z, int n) {
    cplx r = 1.0;
    for (int i = 0; i < n; ++i) r *= z;
    return r;
}

double parity(int N) { return (N % 2 == 0) ? 1.0 : -1.0; }

// (-i)^N and i^N without floating-point phases
cplx i_pow(int N) {
    static const cplx cyc[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return cyc[((N % 4) + 4) % 4];
}

bool on_real_cut(cplx z) { return std::fabs(z.imag()) <= 1e-15 * std::abs(z) && std::fabs(z.real()) > 1.0; }

cplx checked_atan(cplx z) {
    if (std::fabs(z.real()) <= 1e-15 * std::abs(z) && std::fabs(z.imag()) >= 1.0)
        throw BranchCut("arctan argument on the imaginary cut");
    return std::atan(z);
}

cplx checked_log(cplx z) {
    if (std::fabs(z.imag()) <= 1e-15 * std::abs(z) && z.real() <= 0.0) throw BranchCut("log argument on the negative real cut");
    return std::log(z);
}

}  // namespace

LrScale lr_beta_closed_form(cplx g_inv, cplx k, int N, double nu, LrForm form, const PrecisionPolicy& policy) {
    if (N < 1) throw ValidationError("N must be >= 1");
    if (k == 0.0) throw PoleError("k = 0 in the LR scale");
    LrScale out;
    if (form == LrForm::advanced) {
        if (g_inv == 0.0) {
            out.beta = 0.0;
        } else {
            const double n = N;
            const cplx z = -ipow(g_inv, 2 * N + 2) / k;
            const cplx F = hyp2f1(1.0, (2 * n + 1) / (2 * n + 2), (4 * n + 3) / (2 * n + 2), z, policy);
            out.beta = -ipow(g_inv, 2 * N + 1) * F / (2.0 * k * n + k);
        }
    } else {
        if (g_inv == 0.0) throw PoleError("retarded form needs G = 1/G^{-1}");
        const cplx G = 1.0 / g_inv;
        const double e = 1.0 / (2.0 * N);
        out.beta = G * hyp2f1(1.0, e, 1.0 + e, k * ipow(G, 2 * N), policy);
    }
    out.gamma_tilde = gamma_tilde_at_beta(out.beta, k, N, nu);
    return out;
}

cplx gamma_tilde_at_beta(cplx beta, cplx k, int N, double nu) {
    if (N < 1) throw ValidationError("N must be >= 1");
    const double s = std::sin(nu / N);
    if (s == 0.0) throw PoleError("sin(nu/N) = 0 in gamma_tilde");
    const double n = N;
    return beta * cpow(k, 1.0 / (2 * n)) * std::pow(n, -(2 * n + 2) / (2 * n)) / std::sqrt(cplx(s, 0.0));
}

std::vector<cplx> saddle_points(cplx g_inv, double gamma, int N, const std::vector<int>& n_range) {
    if (N < 1) throw ValidationError("N must be >= 1");
    if (N == 2) throw DomainError("saddle points need N != 2 (exponent 1/(N-2))");
    if (gamma == 0.0) throw PoleError("gamma = 0 in the saddle-point argument");
    const cplx w = -2.0 * g_inv * i_pow(-N) / (double(N) * std::pow(gamma, N));
    if (w == 0.0 && N < 2) throw PoleError("zero base raised to a negative power");
    const cplx arg = cpow(w, 1.0 / (N - 2));
    if (on_real_cut(arg)) throw BranchCut("arcsin argument on the real cut |x| > 1");
    const cplx as = std::asin(arg);
    std::vector<cplx> out;
    out.reserve(n_range.size());
    for (int n : n_range) out.push_back(double(N) * (n * pi + parity(n) * as));
    return out;
}

cplx ln_s_eff(cplx nu, cplx g_inv, double gamma, int N, cplx ln_s0, const PrecisionPolicy& policy) {
    if (N < 1) throw ValidationError("N must be >= 1");
    if (N == 2) throw DomainError("ln S_eff needs N != 2");
    if (gamma == 0.0) throw PoleError("gamma = 0 in ln S_eff");
    const cplx s = std::sin(nu / double(N));
    const double e = 1.0 / (2.0 - N);
    const cplx z = -g_inv * double(N) * cpow(s, 2.0 - N) / (i_pow(-N) * std::pow(gamma, N));
    return s * (double(N - 2) * hyp2f1(1.0, e, 1.0 + e, z, policy) + 2.0) * ln_s0;
}

void WetterichParams::validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw ValidationError("omega must be positive");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be >= 0");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw ValidationError("delta must be >= 0");
    if (!(Lambda >= 0.0) || !std::isfinite(Lambda)) throw ValidationError("Lambda must be >= 0");
    if (N < 1) throw ValidationError("N must be >= 1");
}

cplx wetterich_ground_energy(const WetterichParams& p, WetterichMode mode) {
    p.validate();
    const double w = p.omega;
    switch (mode) {
        case WetterichMode::real_osc:
            return w / pi * std::atan(p.Lambda / w);
        case WetterichMode::perturbed: {
            if (p.delta >= w) throw DomainError("perturbed mode needs delta < omega");
            const double r = std::sqrt(1.0 - p.delta * p.delta / (w * w));
            return w / pi * r * std::atan(p.Lambda / (w * r));
        }
        case WetterichMode::complex_osc: {
            const cplx m = std::sqrt(cplx(w * w - p.gamma * p.gamma, p.gamma * w));
            if (m == 0.0) throw DivisionByZero("sqrt(omega^2 - gamma^2 + i gamma omega) = 0");
            return m * checked_atan(p.Lambda / m);
        }
    }
    throw ValidationError("unknown mode");
}

cplx u_eff(const WetterichParams& p, UeffMode mode, const PrecisionPolicy& policy) {
    p.validate();
    const double w = p.omega, g = p.gamma, L = p.Lambda;
    switch (mode) {
        case UeffMode::n1: {
            // gamma e^{i pi/2} = i gamma, gamma^2 e^{i pi} = -gamma^2
            const cplx ig = I * g;
            const double root = std::sqrt(4.0 * w * w + g * g);
            return 0.5 * ig * checked_log(ig * L + L * L + w * w) -
                   (-2.0 * w * w - g * g) * checked_atan((2.0 * L + ig) / root) / root;
        }
        case UeffMode::n2: {
            if (g == 1.0) throw DomainError("1 + gamma e^{i pi} = 0");
            const cplx one_m = 1.0 - g;
            const cplx r = std::sqrt(one_m);
            return w * checked_atan(L * r / w) / (one_m * r) + (-g * L) / one_m;
        }
        case UeffMode::omega0_split: {
            if (L == 0.0) return 0.0;
            // e^{i (2N-1) pi/2} = i^{2N-1}
            const cplx ep = i_pow(2 * p.N - 1), em = std::conj(ep);
            const double e = 1.0 / (2.0 * p.N);
            const double L2N = std::pow(L, 2 * p.N);
            return L * hyp2f1(1.0, e, 1.0 + e, -em * L2N, policy) - L * hyp2f1(1.0, e, 1.0 + e, -ep * L2N, policy);
        }
        case UeffMode::n_infinity: {
            const double b = 1.0 + parity(p.N) * std::pow(L, 2 * p.N);
            return I * (b * b / 2.0 - 0.5);
        }
    }
    throw ValidationError("unknown mode");
}

std::vector<cplx> continued_fraction_rg(const std::vector<cplx>& g0, const std::vector<double>& tau_grid, int depth) {
    if (depth < 0) throw ValidationError("depth must be >= 0");
    if (g0.size() != tau_grid.size()) throw DimensionMismatch("g0 and tau_grid differ in length");
    const std::size_t n = g0.size();
    if (n == 0) return {};
    auto R = [&](std::size_t i, std::size_t j) {
        return std::exp(-0.5 * (tau_grid[i] * tau_grid[i] + tau_grid[j] * tau_grid[j]));
    };
    std::vector<cplx> g(g0);
    if (depth == 0) {
        for (std::size_t i = 0; i < n; ++i) g[i] += R(i, i);
        return g;
    }
    auto check = [&](cplx den, std::size_t site, int level) {
        if (std::abs(den) == 0.0 || !std::isfinite(std::abs(den)))
            throw DivisionByZero("vanishing denominator at n = " + std::to_string(site) + ", depth " +
                                 std::to_string(level));
    };
    for (int d = 1; d <= depth; ++d) {
        std::vector<cplx> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = (i + 1) % n;
            const cplx a_i = g[i] + R(i, i);
            const cplx a_j = g[j] + R(j, j);
            const double b = R(j, i) * R(i, j);
            check(a_j, j, d);
            const cplx inner = a_i - b / a_j;
            check(inner, i, d);
            next[i] = inner - b / inner;
        }
        g = std::move(next);
    }
    return g;
}

ThirdOrder third_order_corrections(cplx G, cplx gamma) {
    const cplx g2 = gamma * gamma;
    const cplx den = G - g2;
    if (std::abs(den) <= 1e-15 * std::max(std::abs(G), std::abs(g2)) || den == 0.0)
        throw ExceptionalPoint("G^{-1} = gamma^2");
    ThirdOrder t;
    t.dg_inv = -(g2 * G - G * G - G * G * G) / den;
    t.dgamma = -(-gamma * G + g2 * gamma - gamma * G * G) / den;
    return t;
}

Rational normal_order_coeff(int n, int m, int l) {
    if (n < 0 || n > 20) throw RangeError("n must lie in [0, 20]");
    if (m < 0 || m > n) throw RangeError("m must lie in [0, n]");
    if (l < 0 || l > std::min(m, n - m)) throw RangeError("l must lie in [0, min(m, n-m)]");
    auto fact = [](int k) {
        std::int64_t f = 1;
        for (int i = 2; i <= k; ++i) f *= i;
        return f;
    };
    // n!/(n-l)! first keeps every intermediate inside int64
    std::int64_t num = 1;
    for (int i = n - l + 1; i <= n; ++i) num *= i;
    std::int64_t den = (std::int64_t(1) << l) * fact(l) * fact(n - m - l);
    const std::int64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

}  // namespace cflow
