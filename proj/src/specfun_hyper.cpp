#include <cmath>

#include "cflow/specfun.hpp"

namespace cflow {

namespace {

using lc = std::complex<long double>;

bool is_nonpositive_integer(cplx s) {
    return s.imag() == 0.0 && s.real() <= 0.0 && s.real() == std::floor(s.real());
}

// Direct power series; returns when the tail is below tol and the term ratio is contracting.
cplx series(const std::vector<cplx>& a, const std::vector<cplx>& b, cplx z, const PrecisionPolicy& p) {
    lc term = 1.0L, sum = 1.0L, zz(z);
    for (int k = 0; k < p.max_terms; ++k) {
        lc ratio = zz / static_cast<long double>(k + 1);
        for (const auto& ai : a) ratio *= lc(ai) + static_cast<long double>(k);
        for (const auto& bj : b) ratio /= lc(bj) + static_cast<long double>(k);
        term *= ratio;
        sum += term;
        if (term == 0.0L) return cplx(sum);
        const long double r = std::abs(ratio);
        if (r < 1.0L && std::abs(term) * r / (1.0L - r) <= p.rel_tol * 1e-3 * std::abs(sum)) return cplx(sum);
    }
    throw NonConvergence("hypergeometric series exceeded max_terms");
}

// Analytic continuation of 2F1 along the ray from 0 to z by re-expanding the
// hypergeometric ODE z(1-z)w'' + [c-(a+b+1)z]w' - ab w = 0 in Taylor series.
cplx continue_2f1(cplx a, cplx b, cplx c, cplx z, const PrecisionPolicy& p) {
    cplx zc = z * (0.5 / std::abs(z));
    cplx w = series({a, b}, {c}, zc, p);
    cplx dw = a * b / c * series({a + 1.0, b + 1.0}, {c + 1.0}, zc, p);
    const cplx dir = z / std::abs(z);
    for (int step = 0; step < p.max_terms; ++step) {
        const double remaining = std::abs(z - zc);
        if (remaining == 0.0) return w;
        const double radius = std::min(std::abs(zc), std::abs(1.0 - zc));
        const double hlen = std::min(0.5 * radius, remaining);
        const cplx h = (hlen == remaining) ? z - zc : dir * hlen;

        const lc p0 = lc(zc * (1.0 - zc)), p1 = lc(1.0 - 2.0 * zc);
        const lc q0 = lc(c - (a + b + 1.0) * zc), q1 = -lc(a + b + 1.0), r = -lc(a * b);
        lc d0 = lc(w), d1 = lc(dw), hh(h);
        lc val = d0 + d1 * hh, der = d1;
        lc hp = hh;  // h^{n+1} for the value sum, h^n for the derivative sum
        int small = 0;
        for (int n = 0; n < 2000; ++n) {
            const long double nn = n;
            lc d2 = -((p1 * nn + q0) * (nn + 1) * d1 + (-nn * (nn - 1) + q1 * nn + r) * d0) / (p0 * (nn + 1) * (nn + 2));
            lc tv = d2 * hp * hh;
            lc td = d2 * (nn + 2) * hp;
            val += tv;
            der += td;
            hp *= hh;
            d0 = d1;
            d1 = d2;
            if (std::abs(tv) <= 1e-19L * std::abs(val) && std::abs(td) <= 1e-19L * std::abs(der)) {
                if (++small == 3) break;
            } else {
                small = 0;
            }
        }
        w = cplx(val);
        dw = cplx(der);
        zc += h;
        if (hlen == remaining) return w;
    }
    throw NonConvergence("2F1 continuation exceeded max_terms steps");
}

}  // namespace

cplx hyp2f1(cplx a, cplx b, cplx c, cplx z, const PrecisionPolicy& policy) {
    policy.validate();
    if (is_nonpositive_integer(c)) throw PoleError("2F1 denominator parameter is a non-positive integer");
    if (z == 0.0) return 1.0;
    if (is_nonpositive_integer(a) || is_nonpositive_integer(b)) return series({a, b}, {c}, z, policy);
    if (z.imag() == 0.0 && z.real() >= 1.0) throw BranchCut("2F1 evaluated on the cut [1, inf)");
    if (std::abs(z) < 0.9) return series({a, b}, {c}, z, policy);
    const cplx w = z / (z - 1.0);
    if (std::abs(w) < 0.9) return cpow(1.0 - z, -a) * series({a, c - b}, {c}, w, policy);
    return continue_2f1(a, b, c, z, policy);
}

cplx pfq(const std::vector<cplx>& numer, const std::vector<cplx>& denom, cplx z, const PrecisionPolicy& policy) {
    policy.validate();
    for (const auto& bj : denom)
        if (is_nonpositive_integer(bj)) throw PoleError("pFq denominator parameter is a non-positive integer");
    if (numer.size() == 2 && denom.size() == 1) return hyp2f1(numer[0], numer[1], denom[0], z, policy);
    if (z == 0.0) return 1.0;
    bool terminating = false;
    for (const auto& ai : numer) terminating = terminating || is_nonpositive_integer(ai);
    const std::size_t p = numer.size(), q = denom.size();
    if (!terminating) {
        if (p > q + 1) throw DomainError("pFq with p > q + 1 diverges");
        if (p == q + 1 && std::abs(z) >= 1.0) throw DomainError("pFq with p = q + 1 needs |z| < 1");
    }
    return series(numer, denom, z, policy);
}

cplx poly_via_2f1(cplx z, int n, const PrecisionPolicy& policy) {
    if (n < 0) throw RangeError("poly_via_2f1 needs n >= 0");
    const cplx w = std::pow(z, n);
    const cplx u = 1.0 + w, v = 1.0 - w;
    return u * hyp2f1(0.5, 1.0, 1.5, -u * u, policy) - v * hyp2f1(0.5, 1.0, 1.5, -v * v, policy);
}

}  // namespace cflow
