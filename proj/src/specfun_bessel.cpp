#include <cmath>

#include "cflow/specfun.hpp"

namespace cflow {

namespace {

using lc = std::complex<long double>;
constexpr long double euler_gamma_l = 0.57721566490153286060651209008240243L;

bool is_int(double nu) { return nu == std::floor(nu); }

double asymptotic_radius(double nu) { return 17.0 + 0.5 * nu * nu; }

lc lpow(lc w, long double a) {
    if (w == 0.0L) return a == 0.0L ? lc(1.0L) : lc(0.0L);
    return std::exp(a * std::log(w));
}

// (z/2)^nu sum_k (sign z^2/4)^k / (k! Gamma(nu+k+1)); sign = -1 gives J, +1 gives I.
lc power_series(double nu, cplx z, int sign) {
    const lc h = lc(z) / 2.0L;
    const lc q = static_cast<long double>(sign) * h * h;
    const long double lnu = nu;
    lc term = 1.0L / std::tgamma(lnu + 1.0L);
    lc sum = term;
    long double peak = std::abs(term);
    for (int k = 1; k < 100000; ++k) {
        term *= q / (static_cast<long double>(k) * (lnu + k));
        sum += term;
        const long double at = std::abs(term);
        peak = std::max(peak, at);
        if (k > std::abs(h) && (at <= 1e-21L * std::abs(sum) || at <= 1e-24L * peak)) break;
    }
    return sum * lpow(h, lnu);
}

// sum_k (psi(k+1) + psi(n+k+1)) q^k / (k! (n+k)!)
lc psi_series(int n, lc q) {
    long double hk = 0.0L, hnk = 0.0L;
    for (int j = 1; j <= n; ++j) hnk += 1.0L / j;
    lc term = 1.0L / std::tgamma(static_cast<long double>(n) + 1.0L);
    lc sum = term * (hk + hnk - 2.0L * euler_gamma_l);
    long double peak = std::abs(sum);
    for (int k = 1; k < 100000; ++k) {
        term *= q / (static_cast<long double>(k) * (n + k));
        hk += 1.0L / k;
        hnk += 1.0L / (n + k);
        lc t = term * (hk + hnk - 2.0L * euler_gamma_l);
        sum += t;
        const long double at = std::abs(t);
        peak = std::max(peak, at);
        if (k > std::sqrt(std::abs(q)) && (at <= 1e-21L * std::abs(sum) || at <= 1e-24L * peak)) break;
    }
    return sum;
}

// sum_{k<n} ((n-k-1)!/k!) q^k
lc finite_sum(int n, lc q) {
    lc sum = 0.0L, qk = 1.0L;
    for (int k = 0; k < n; ++k) {
        sum += std::tgamma(static_cast<long double>(n - k)) / std::tgamma(static_cast<long double>(k + 1)) * qk;
        qk *= q;
    }
    return sum;
}

cplx y_integer_series(int n, cplx z) {
    const lc h = lc(z) / 2.0L;
    const long double lpi = 3.14159265358979323846264338327950288L;
    lc jn = power_series(n, z, -1);
    lc r = -lpow(h, -n) / lpi * finite_sum(n, h * h) + 2.0L / lpi * std::log(h) * jn -
           lpow(h, n) / lpi * psi_series(n, -h * h);
    return cplx(r);
}

cplx k_integer_series(int n, cplx z) {
    const lc h = lc(z) / 2.0L;
    const long double sgn = (n % 2 == 0) ? 1.0L : -1.0L;
    lc in = power_series(n, z, +1);
    lc r = 0.5L * lpow(h, -n) * finite_sum(n, -h * h) - sgn * std::log(h) * in + sgn * 0.5L * lpow(h, n) * psi_series(n, h * h);
    return cplx(r);
}

// Hankel expansions, Re z >= 0.
void hankel_pq(double nu, cplx z, cplx& P, cplx& Q) {
    const double mu = 4.0 * nu * nu;
    P = 1.0;
    Q = 0.0;
    cplx a = 1.0;
    double last = 1e300;
    for (int k = 1; k < 200; ++k) {
        a *= (mu - double((2 * k - 1) * (2 * k - 1))) / (8.0 * k) / z;
        const double m = std::abs(a);
        if (m > last || m < 1e-18) break;
        last = m;
        const int s = ((k / 2) % 2 == 0) ? 1 : -1;
        if (k % 2 == 0)
            P += double(s) * a;
        else
            Q += double(s) * a;
    }
}

cplx j_asym(double nu, cplx z) {
    cplx P, Q;
    hankel_pq(nu, z, P, Q);
    const cplx w = z - (0.5 * nu + 0.25) * pi;
    return std::sqrt(2.0 / (pi * z)) * (P * std::cos(w) - Q * std::sin(w));
}

cplx y_asym(double nu, cplx z) {
    cplx P, Q;
    hankel_pq(nu, z, P, Q);
    const cplx w = z - (0.5 * nu + 0.25) * pi;
    return std::sqrt(2.0 / (pi * z)) * (P * std::sin(w) + Q * std::cos(w));
}

cplx k_asym(double nu, cplx z) {
    const double mu = 4.0 * nu * nu;
    cplx sum = 1.0, a = 1.0;
    double last = 1e300;
    for (int k = 1; k < 200; ++k) {
        a *= (mu - double((2 * k - 1) * (2 * k - 1))) / (8.0 * k) / z;
        const double m = std::abs(a);
        if (m > last || m < 1e-18) break;
        last = m;
        sum += a;
    }
    return std::sqrt(pi / (2.0 * z)) * std::exp(-z) * sum;
}

// K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt by the trapezoid rule, Re z > 0.
cplx k_integral(double nu, cplx z) {
    const double ratio = z.real() / std::max(std::fabs(z.imag()), 1e-300);
    const double d = std::min(0.5, 0.5 * std::atan(ratio));
    const double h = 2.0 * pi * d / 45.0;
    cplx sum = 0.5 * std::exp(-z);
    for (int k = 1; k < 1000000; ++k) {
        const double t = k * h;
        const cplx term = std::exp(-z * std::cosh(t)) * std::cosh(nu * t);
        sum += term;
        if (z.real() * std::cosh(t) > 45.0 + std::fabs(nu) * t && std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return h * sum;
}

cplx bessel_j(double nu, cplx z) {
    if (nu < 0 && is_int(nu)) return (std::fmod(-nu, 2.0) == 0.0 ? 1.0 : -1.0) * bessel_j(-nu, z);
    if (z == 0.0) {
        if (nu == 0.0) return 1.0;
        if (nu > 0.0) return 0.0;
        throw PoleError("J_nu(0) diverges for negative non-integer order");
    }
    if (std::abs(z) <= asymptotic_radius(nu)) return cplx(power_series(nu, z, -1));
    if (z.real() >= 0.0) return j_asym(nu, z);
    const double m = z.imag() >= 0.0 ? 1.0 : -1.0;
    return std::exp(cplx(0.0, m * nu * pi)) * j_asym(nu, -z);
}

cplx bessel_y(double nu, cplx z) {
    if (nu < 0 && is_int(nu)) return (std::fmod(-nu, 2.0) == 0.0 ? 1.0 : -1.0) * bessel_y(-nu, z);
    if (z == 0.0) throw PoleError("Y_nu has a singularity at z = 0");
    if (std::abs(z) > asymptotic_radius(nu)) {
        if (z.real() >= 0.0) return y_asym(nu, z);
        const double m = z.imag() >= 0.0 ? 1.0 : -1.0;
        const cplx w = -z;
        return std::exp(cplx(0.0, -m * nu * pi)) * y_asym(nu, w) + m * 2.0 * I * std::cos(nu * pi) * j_asym(nu, w);
    }
    if (is_int(nu)) return y_integer_series(static_cast<int>(nu), z);
    return (bessel_j(nu, z) * std::cos(nu * pi) - bessel_j(-nu, z)) / std::sin(nu * pi);
}

cplx bessel_i(double nu, cplx z) {
    if (nu < 0 && is_int(nu)) return bessel_i(-nu, z);
    if (z == 0.0) {
        if (nu == 0.0) return 1.0;
        if (nu > 0.0) return 0.0;
        throw PoleError("I_nu(0) diverges for negative non-integer order");
    }
    if (std::abs(z) <= asymptotic_radius(nu)) return cplx(power_series(nu, z, +1));
    if (std::arg(z) <= 0.5 * pi) return std::exp(cplx(0.0, -0.5 * nu * pi)) * bessel_j(nu, I * z);
    return std::exp(cplx(0.0, 0.5 * nu * pi)) * bessel_j(nu, -I * z);
}

cplx bessel_k(double nu, cplx z) {
    nu = std::fabs(nu);
    if (z == 0.0) throw PoleError("K_nu has a singularity at z = 0");
    const double r = std::abs(z);
    if (z.real() < 0.0 && r > asymptotic_radius(nu)) {
        const double m = z.imag() >= 0.0 ? 1.0 : -1.0;
        const cplx w = -z;
        return std::exp(cplx(0.0, -m * nu * pi)) * bessel_k(nu, w) - m * pi * I * bessel_i(nu, w);
    }
    if (r > asymptotic_radius(nu)) return k_asym(nu, z);
    if (z.real() > 2.0) return k_integral(nu, z);
    if (is_int(nu)) return k_integer_series(static_cast<int>(nu), z);
    const lc diff = power_series(-nu, z, +1) - power_series(nu, z, +1);
    return cplx(diff) * (0.5 * pi / std::sin(nu * pi));
}

}  // namespace

cplx bessel(BesselKind kind, double nu, cplx z, const PrecisionPolicy& policy) {
    policy.validate();
    if (!std::isfinite(nu)) throw DomainError("Bessel order is not finite");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("Bessel argument is not finite");
    z = cplx(z.real() + 0.0, z.imag() + 0.0);  // drop negative zeros so the cut side is +i
    switch (kind) {
        case BesselKind::J: return bessel_j(nu, z);
        case BesselKind::Y: return bessel_y(nu, z);
        case BesselKind::I: return bessel_i(nu, z);
        case BesselKind::K: return bessel_k(nu, z);
    }
    return 0.0;
}

cplx kelvin_bei(double nu, cplx x, const PrecisionPolicy& policy) {
    policy.validate();
    if (nu < 0 && is_int(nu))
        return (std::fmod(-nu, 2.0) == 0.0 ? 1.0 : -1.0) * kelvin_bei(-nu, x, policy);
    if (x == 0.0) {
        if (nu >= 0.0) return 0.0;
        throw PoleError("bei_nu(0) diverges for negative non-integer order");
    }
    const long double lpi = 3.14159265358979323846264338327950288L;
    const lc h = lc(x) / 2.0L, q = h * h;
    const long double lnu = nu;
    lc coef = 1.0L / std::tgamma(lnu + 1.0L);
    lc sum = coef * std::sin(0.75L * lnu * lpi);
    long double peak = std::abs(coef);
    for (int k = 1; k < 100000; ++k) {
        coef *= q / (static_cast<long double>(k) * (lnu + k));
        const lc t = coef * std::sin((0.75L * lnu + 0.5L * k) * lpi);
        sum += t;
        const long double at = std::abs(coef);
        peak = std::max(peak, at);
        if (k > std::abs(h) && (at <= 1e-21L * std::abs(sum) || at <= 1e-24L * peak)) break;
    }
    return cplx(sum * lpow(h, lnu));
}

double kelvin_bei(double nu, double x, const PrecisionPolicy& policy) {
    if (x < 0.0) throw DomainError("kelvin_bei needs x >= 0");
    return kelvin_bei(nu, cplx(x, 0.0), policy).real();
}

}  // namespace cflow
