#ifndef CFLOW_BETHE_HPP
#define CFLOW_BETHE_HPP

#include <optional>
#include <vector>

#include "cflow/specfun.hpp"

namespace cflow {

struct BetheRoots {
    std::vector<cplx> roots;
    int N = 0;
    double residual = 0.0;
    int iterations = 0;
};

// x_j - 1/2 sum_{k!=j} 1/(x_j-x_k) - (-1)^N sum_{k!=j} (x_j-x_k)^{2N}
std::vector<cplx> bethe_defect(const std::vector<cplx>& x, int N);
std::vector<double> hermite_zeros(int n);

BetheRoots solve_bethe_roots(int n, int N, const std::optional<std::vector<cplx>>& init = std::nullopt,
                             double tol = 1e-12);

cplx bethe_wavefunction(cplx x, const BetheRoots& roots);

struct RiccatiParams {
    double q = 1.0;
    cplx zeta{1.0, 0.0};
    cplx a{1.0, 0.0};
};

enum class RiccatiBranch { zeta_pos, zeta_neg };

// q = (N+2)/2, zeta = i^{2N} = (-1)^N
RiccatiParams riccati_params(int N, cplx a = 1.0);
RiccatiBranch default_branch(const RiccatiParams& p);

// u solves u'' = zeta x^{2q-2} u on either branch.
cplx riccati_u(double x, const RiccatiParams& params, RiccatiBranch branch);
// Principal-branch continuation to any nonzero x, value and derivative.
cplx riccati_u(cplx x, const RiccatiParams& params, RiccatiBranch branch);
cplx riccati_du(cplx x, const RiccatiParams& params, RiccatiBranch branch);

struct Momentum {
    cplx p_x;
    cplx p_theta;
    cplx total() const { return p_x + p_theta; }
};

Momentum quasi_momentum(double x, const BetheRoots& roots, const RiccatiParams& params);

struct GpSample {
    cplx s;
    cplx chi_L;
    cplx chi_R;
    cplx xi;
};

struct GpTrajectory {
    std::vector<GpSample> samples;
    bool fallback = false;  // 2q == 1: dchi/ds = s chi
};

GpTrajectory gp_scaling_flow(double q2, const std::vector<cplx>& s_contour, cplx chi0, cplx xi0);

}  // namespace cflow

#endif
