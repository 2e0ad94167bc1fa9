#include <cfloat>
#include <cmath>

#include "cflow/specfun.hpp"

namespace cflow {

namespace {

constexpr double euler_gamma = 0.57721566490153286061;

bool is_nonpositive_integer(cplx s) {
    return s.imag() == 0.0 && s.real() <= 0.0 && s.real() == std::floor(s.real());
}

void require_finite(cplx z, const char* what) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError(std::string(what) + " is not finite");
}

// gamma(s, z) * z^{-s} e^{z} summed as sum_k z^k / (s)_{k+1}
cplx lower_series(cplx s, cplx z, const PrecisionPolicy& p) {
    using lc = std::complex<long double>;
    lc zz(z), ss(s);
    lc term = lc(1.0L) / ss;
    lc sum = term;
    for (int k = 1; k <= p.max_terms; ++k) {
        term *= zz / (ss + static_cast<long double>(k));
        sum += term;
        if (std::abs(term) <= p.rel_tol * 1e-2 * std::abs(sum))
            return cplx(sum) * cpow(z, s) * std::exp(-z);
    }
    throw NonConvergence("incomplete gamma series exceeded max_terms");
}

// Legendre continued fraction, modified Lentz.
cplx upper_cf(cplx s, cplx z, const PrecisionPolicy& p) {
    const double tiny = 1e-300;
    cplx f = z + 1.0 - s;
    if (f == 0.0) f = tiny;
    cplx C = f, D = 0.0;
    for (int n = 1; n <= p.max_terms; ++n) {
        cplx a = -double(n) * (double(n) - s);
        cplx b = z + double(2 * n + 1) - s;
        D = b + a * D;
        if (D == 0.0) D = tiny;
        C = b + a / C;
        if (C == 0.0) C = tiny;
        D = 1.0 / D;
        cplx delta = C * D;
        f *= delta;
        if (std::abs(delta - 1.0) < p.rel_tol * 1e-2) return std::exp(-z) * cpow(z, s) / f;
    }
    throw NonConvergence("incomplete gamma continued fraction exceeded max_terms");
}

cplx expint_e1_series(cplx z, const PrecisionPolicy& p) {
    using lc = std::complex<long double>;
    lc zz(z);
    lc term = 1.0L, sum = 0.0L;
    for (int k = 1; k <= p.max_terms; ++k) {
        term *= -zz / static_cast<long double>(k);
        lc t = term / static_cast<long double>(k);
        sum += t;
        if (std::abs(t) <= p.rel_tol * 1e-2 * std::abs(sum)) return -euler_gamma - std::log(z) - cplx(sum);
    }
    throw NonConvergence("E1 series exceeded max_terms");
}

}  // namespace

void PrecisionPolicy::validate() const {
    if (!(rel_tol > 0.0)) throw ValidationError("rel_tol must be positive");
    if (max_terms < 1) throw ValidationError("max_terms must be at least 1");
}

cplx cpow(cplx w, cplx a) {
    if (w == 0.0) {
        if (a == 0.0) return 1.0;
        if (a.real() > 0.0) return 0.0;
        throw PoleError("zero raised to a power with non-positive real part");
    }
    return std::exp(a * std::log(w));
}

cplx cpow(cplx w, double a) { return cpow(w, cplx(a, 0.0)); }

cplx gamma(cplx s) {
    require_finite(s, "gamma argument");
    if (is_nonpositive_integer(s)) throw PoleError("Gamma pole at s = " + std::to_string(s.real()));
    if (s.real() < 0.5) return pi / (std::sin(pi * s) * gamma(1.0 - s));
    static const double c[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    s -= 1.0;
    cplx x = c[0];
    for (int i = 1; i < 9; ++i) x += c[i] / (s + double(i));
    cplx t = s + 7.5;
    return std::sqrt(2.0 * pi) * std::exp((s + 0.5) * std::log(t) - t) * x;
}

double rgamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) return 0.0;
    return static_cast<double>(1.0L / std::tgamma(static_cast<long double>(x)));
}

cplx upper_incomplete_gamma(cplx s, cplx z, const PrecisionPolicy& policy) {
    policy.validate();
    require_finite(s, "s");
    require_finite(z, "z");
    if (z == 0.0) {
        // Gamma(s, 0) = Gamma(s) only where the defining integral converges at 0.
        if (s.real() <= 0.0) throw PoleError("Gamma(s, 0) diverges for Re s <= 0");
        return gamma(s);
    }
    const double r = std::abs(z);
    const bool use_series = r < 0.9 || r + z.real() < 8.0;
    if (!use_series) return upper_cf(s, z, policy);
    if (is_nonpositive_integer(s)) {
        // Gamma(s, z) = (Gamma(s+1, z) - z^s e^{-z}) / s, started from E1.
        cplx g = expint_e1_series(z, policy);
        const int m = static_cast<int>(-s.real());
        for (int j = 1; j <= m; ++j) {
            const double sj = -double(j);
            g = (g - cpow(z, sj) * std::exp(-z)) / sj;
        }
        return g;
    }
    return gamma(s) - lower_series(s, z, policy);
}

double erfi(double x) {
    if (!std::isfinite(x)) throw DomainError("erfi argument is not finite");
    const double ax = std::fabs(x);
    if (ax * ax > std::log(DBL_MAX) - 1.0) throw Overflow("erfi(" + std::to_string(x) + ") exceeds double range");
    const double sgn = x < 0.0 ? -1.0 : 1.0;
    const long double two_over_sqrtpi = 1.1283791670955125738961589031215452L;
    if (ax <= 6.0) {
        long double x2 = static_cast<long double>(ax) * ax;
        long double term = ax, sum = ax;
        for (int k = 1; k < 2000; ++k) {
            term *= x2 / k;
            long double t = term / (2 * k + 1);
            sum += t;
            if (t < 1e-21L * sum) break;
        }
        return sgn * static_cast<double>(two_over_sqrtpi * sum);
    }
    long double inv = 1.0L / (2.0L * ax * ax), term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 60; ++k) {
        long double next = term * (2 * k - 1) * inv;
        if (next > term) break;
        term = next;
        sum += term;
        if (term < 1e-21L) break;
    }
    long double v = std::exp(static_cast<long double>(ax) * ax) / (ax * 1.7724538509055160272981674833411452L) * sum;
    if (!std::isfinite(static_cast<double>(v))) throw Overflow("erfi overflow");
    return sgn * static_cast<double>(v);
}

}  // namespace cflow
