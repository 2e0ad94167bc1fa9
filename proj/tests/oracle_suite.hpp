// Fixed 100-point grids per special function, compared against tests/oracles.hpp.
// Shared by the specfun unit tests and the acceptance binary.
#ifndef CFLOW_TEST_ORACLE_SUITE_HPP
#define CFLOW_TEST_ORACLE_SUITE_HPP

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "cflow/specfun.hpp"
#include "oracles.hpp"

namespace oracle {

struct GridResult {
    std::string name;
    int points = 0;
    double max_rel = 0.0;
    std::string worst;  // where max_rel was hit
};

inline std::string where(cplx a, cplx b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "(%.6g%+.6gi, %.6g%+.6gi)", a.real(), a.imag(), b.real(), b.imag());
    return buf;
}

inline void note(GridResult& r, double e, const std::string& at) {
    ++r.points;
    if (!(e <= r.max_rel)) {
        r.max_rel = std::isnan(e) ? INFINITY : e;
        r.worst = at;
    }
}

// grid angles stay off the real axis so the Bessel and 2F1 zeros there do not
// turn relative errors into noise
inline const std::vector<double>& angles() {
    static const std::vector<double> a = {0.3, 1.0, -0.7, 1.4, -1.3, 2.2, -2.5, 2.8, -0.2, 0.6};
    return a;
}

inline GridResult grid_upper_gamma() {
    GridResult r{"upper_incomplete_gamma"};
    const double s_im[] = {0.0, 0.5, -0.7};
    for (int i = 0; i < 100; ++i) {
        const cplx s(0.2 + 3.3 * (i % 10) / 9.0, s_im[i % 3]);
        const double rad = 0.1 + 11.9 * (i / 10) / 9.0;
        const cplx z = std::polar(rad, angles()[(i * 7) % 10]);
        note(r, rel_err(cflow::upper_incomplete_gamma(s, z), upper_gamma(s, z)), where(s, z));
    }
    return r;
}

inline GridResult grid_hyp2f1() {
    GridResult r{"pfq 2F1"};
    for (int i = 0; i < 100; ++i) {
        const cplx a(-1.2 + 2.9 * (i % 7) / 6.0, 0.4 * ((i % 3) - 1));
        const double b = 0.3 + 1.2 * (i % 5) / 4.0;
        const double c = b + 0.5 + 1.5 * (i % 4) / 3.0;
        const double rad = 0.1 + 4.9 * (i / 10) / 9.0;
        const cplx z = std::polar(rad, angles()[(i * 3) % 10]);
        note(r, rel_err(cflow::hyp2f1(a, b, c, z), hyp2f1_euler(a, b, c, z)), where(a, z));
    }
    return r;
}

inline GridResult grid_hyp1f1() {
    GridResult r{"pfq 1F1"};
    for (int i = 0; i < 100; ++i) {
        const double a = 0.3 + 1.7 * (i % 6) / 5.0;
        const double b = a + 0.5 + 1.5 * (i % 4) / 3.0;
        const double rad = 0.1 + 14.9 * (i / 10) / 9.0;
        const cplx z = std::polar(rad, angles()[(i * 3 + 1) % 10]);
        note(r, rel_err(cflow::pfq({a}, {b}, z), hyp1f1_kummer(a, b, z)), where(a, z));
    }
    return r;
}

inline GridResult grid_hyp1f4() {
    GridResult r{"pfq 1F4"};
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> num = {1.0 + 0.25 * (i % 3)};
        const std::vector<double> den = {7.0 / 6 + 0.1 * (i % 4), 4.0 / 3, 5.0 / 3 - 0.2 * (i % 2), 11.0 / 6};
        const double rad = 0.05 + 60.0 * (i / 10) / 9.0;
        const cplx z = std::polar(rad, angles()[(i * 7 + 3) % 10]);
        std::vector<cplx> cn(num.begin(), num.end()), cd(den.begin(), den.end());
        note(r, rel_err(cflow::pfq(cn, cd, z), pfq_series(num, den, z)), where(num[0], z));
    }
    return r;
}

inline GridResult grid_bessel(cflow::BesselKind kind) {
    using K = cflow::BesselKind;
    static const char* names[] = {"bessel J", "bessel Y", "bessel I", "bessel K"};
    GridResult r{names[int(kind)]};
    const double frac_nu[] = {1.0 / 3, 0.5, -1.0 / 3, 2.5, 1.75, -0.6, 0.25};
    const double int_nu[] = {0.0, 1.0, 2.0, 3.0};
    for (int i = 0; i < 100; ++i) {
        const double rad = 0.2 + 24.8 * (i / 10) / 9.0;
        double ang = angles()[(i * 3 + 2) % 10];
        const bool integer_order = i % 4 == 0;
        const double nu = integer_order ? int_nu[(i / 4) % 4] : frac_nu[i % 7];
        // integral representations of integer-order Y and K need Re z > 0
        if (integer_order && (kind == K::Y || kind == K::K)) ang = std::clamp(ang, -1.4, 1.4);
        const cplx z = std::polar(rad, ang);
        cplx want;
        switch (kind) {
            case K::J: want = bessel_j(nu, z); break;
            case K::I: want = bessel_i(nu, z); break;
            case K::Y: want = integer_order ? bessel_y_int(nu, z) : bessel_y_frac(nu, z); break;
            case K::K: want = integer_order ? bessel_k_int(nu, z) : bessel_k_frac(nu, z); break;
        }
        note(r, rel_err(cflow::bessel(kind, nu, z), want), where(nu, z));
    }
    return r;
}

inline GridResult grid_erfi() {
    GridResult r{"erfi"};
    for (int i = 0; i < 100; ++i) {
        const double x = -5.0 + 10.0 * (i + 0.5) / 100.0;
        note(r, rel_err(cflow::erfi(x), erfi_quad(x)), where(x, 0.0));
    }
    return r;
}

// Relative to |J_nu(x e^{3 i pi/4})| = |ber + i bei|: bei alone has real zeros.
inline GridResult grid_bei() {
    GridResult r{"kelvin_bei"};
    const double nus[] = {0.0, 1.0, 0.5, -1.0 / 3, 2.0};
    for (int i = 0; i < 100; ++i) {
        const double nu = nus[i % 5];
        const double x = 0.1 + 9.9 * (i / 5) / 19.0;
        const double want = kelvin_bei_series(nu, x);
        const double mod = std::abs(bessel_j(nu, std::polar(x, 0.75 * pi)));
        const double e = std::fabs(cflow::kelvin_bei(nu, x) - want) / std::max(mod, 1e-300);
        note(r, e, where(nu, x));
    }
    return r;
}

inline std::vector<GridResult> full_oracle_suite() {
    using K = cflow::BesselKind;
    return {grid_upper_gamma(), grid_hyp2f1(),         grid_hyp1f1(),         grid_hyp1f4(),
            grid_bessel(K::J),  grid_bessel(K::Y),      grid_bessel(K::I),     grid_bessel(K::K),
            grid_erfi(),        grid_bei()};
}

// Bessel recurrences with central differences (h = 1e-6), max absolute-relative residual.
inline double bessel_recurrence_residual() {
    using K = cflow::BesselKind;
    double worst = 0.0;
    const double h = 1e-6;
    for (double nu : {0.5, 1.0 / 3, 1.0, 2.25}) {
        for (int j = 0; j < 8; ++j) {
            const cplx z = std::polar(0.5 + 0.6 * j, angles()[j]);
            auto d = [&](K k) {
                return (cflow::bessel(k, nu, z + h) - cflow::bessel(k, nu, z - h)) / (2 * h);
            };
            const cplx J = cflow::bessel(K::J, nu, z), Jm = cflow::bessel(K::J, nu - 1, z);
            const cplx Iv = cflow::bessel(K::I, nu, z), Im = cflow::bessel(K::I, nu - 1, z);
            const cplx Kv = cflow::bessel(K::K, nu, z), Km = cflow::bessel(K::K, nu - 1, z);
            const cplx rJ = d(K::J) - (Jm - nu / z * J);
            const cplx rI = d(K::I) - (Im - nu / z * Iv);
            const cplx rK = d(K::K) - (-Km - nu / z * Kv);
            worst = std::max({worst, std::abs(rJ) / std::max(1.0, std::abs(Jm)),
                              std::abs(rI) / std::max(1.0, std::abs(Im)), std::abs(rK) / std::max(1.0, std::abs(Km))});
        }
    }
    return worst;
}

}  // namespace oracle

#endif
