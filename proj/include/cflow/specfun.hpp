#ifndef CFLOW_SPECFUN_HPP
#define CFLOW_SPECFUN_HPP

#include <vector>

#include "cflow/errors.hpp"
#include "cflow/types.hpp"

namespace cflow {

struct PrecisionPolicy {
    double rel_tol = 1e-12;
    int max_terms = 10000;
    int quad_panels = 64;

    void validate() const;
};

// Principal power exp(a * Log w); 0^a is 0 for Re a > 0, 1 for a == 0.
cplx cpow(cplx w, cplx a);
cplx cpow(cplx w, double a);

cplx gamma(cplx s);
double rgamma(double x);  // 1/Gamma(x), zero at the poles

// Gamma(s, z), principal branch in z.
cplx upper_incomplete_gamma(cplx s, cplx z, const PrecisionPolicy& policy = {});

// Generalized hypergeometric series.  2F1 is continued off the unit disc,
// other (p, q) are summed directly and require p <= q + 1.
cplx pfq(const std::vector<cplx>& numer, const std::vector<cplx>& denom, cplx z,
         const PrecisionPolicy& policy = {});
cplx hyp2f1(cplx a, cplx b, cplx c, cplx z, const PrecisionPolicy& policy = {});

enum class BesselKind { J, Y, I, K };

cplx bessel(BesselKind kind, double nu, cplx z, const PrecisionPolicy& policy = {});

// bei_nu(x) = Im J_nu(x e^{3 i pi / 4}) for real x >= 0.
double kelvin_bei(double nu, double x, const PrecisionPolicy& policy = {});
// Continuation of the defining power series to complex x, with (x/2)^nu principal.
cplx kelvin_bei(double nu, cplx x, const PrecisionPolicy& policy = {});

double erfi(double x);

// (1+w) 2F1(1/2,1;3/2;-(1+w)^2) - (1-w) 2F1(1/2,1;3/2;-(1-w)^2) with w = z^n.
cplx poly_via_2f1(cplx z, int n, const PrecisionPolicy& policy = {});

}  // namespace cflow

#endif
