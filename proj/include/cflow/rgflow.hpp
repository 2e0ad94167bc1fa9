#ifndef CFLOW_RGFLOW_HPP
#define CFLOW_RGFLOW_HPP

#include <cstdint>
#include <vector>

#include "cflow/specfun.hpp"

namespace cflow {

// Implicit one-step tau recursion.  G^{-1}_n solves x^2 - G^{-1}_{n-1} x + gamma_n^2 = 0
// (root nearest G^{-1}_{n-1}); gamma_n = gamma_{n-1} + gamma_n^2 gamma_{n-1} / G^{-1}_n
// by damped fixed point.  tau advances by one.
FlowState tau_step_recursion(const FlowState& prev);
// The continuity root alone, for a given gamma.
cplx tau_step_branch(cplx g_prev, cplx gamma);

enum class OneLoopVariant { separated_v1, appendix_v2 };

// aux of each state holds the instantaneous invariant: C for v1, (G^{-1}/gamma)^2 - log(1/gamma) for v2.
// tau carries gamma (gamma is the flow parameter here).
Trajectory one_loop_invariant_flow(OneLoopVariant variant, const std::vector<double>& gamma_grid, double C,
                                   bool complex_mode = false);

// tau_k = s_k e^{i angle}, s_k = k * s_max / steps.
std::vector<cplx> ray_contour(double angle, double s_max, int steps);

// dG/dtau = G^2 - N^2 gamma^{2N},  dgamma/dtau = gamma G.  BlowUp once |G| > 1e12.
Trajectory n_power_flow(const FlowState& init, int N, const std::vector<cplx>& contour);

// dG/dtau = G^2 - N^2 gamma^{2N} sin^{2N}(nu/N),  N gamma^{N-1} dgamma/dtau = (-gamma)^N sin^2(nu/N) G.
Trajectory lr_flow(const FlowState& init, int N, double nu, const std::vector<cplx>& contour);

enum class LrForm { advanced, retarded };

struct LrScale {
    cplx beta;
    cplx gamma_tilde;
};

LrScale lr_beta_closed_form(cplx g_inv, cplx k, int N, double nu, LrForm form, const PrecisionPolicy& policy = {});
// gamma_tilde = beta k^{1/(2N)} N^{-(2N+2)/(2N)} / sqrt(sin(nu/N)) at fixed beta.
cplx gamma_tilde_at_beta(cplx beta, cplx k, int N, double nu);

// nu_n = N [n pi + (-1)^n asin(w^{1/(N-2)})],  w = -2 G^{-1} e^{-i N pi/2} / (N gamma^N)
std::vector<cplx> saddle_points(cplx g_inv, double gamma, int N, const std::vector<int>& n_range);
cplx ln_s_eff(cplx nu, cplx g_inv, double gamma, int N, cplx ln_s0 = 1.0, const PrecisionPolicy& policy = {});

struct WetterichParams {
    double omega = 1.0;
    double gamma = 0.0;
    double delta = 0.0;
    double Lambda = 1e6;
    int N = 1;

    void validate() const;
};

enum class WetterichMode { real_osc, perturbed, complex_osc };
enum class UeffMode { n1, n2, omega0_split, n_infinity };

cplx wetterich_ground_energy(const WetterichParams& params, WetterichMode mode);
cplx u_eff(const WetterichParams& params, UeffMode mode, const PrecisionPolicy& policy = {});

// R_{ij} = exp(-(tau_i^2 + tau_j^2)/2), periodic in the site index.
std::vector<cplx> continued_fraction_rg(const std::vector<cplx>& g0, const std::vector<double>& tau_grid, int depth);

struct ThirdOrder {
    cplx dg_inv;
    cplx dgamma;
};

ThirdOrder third_order_corrections(cplx g_inv, cplx gamma);

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
    double value() const { return double(num) / double(den); }
    bool operator==(const Rational&) const = default;
};

// n! / (2^l l! (n-l)! (n-m-l)!), reduced.  n <= 20.
Rational normal_order_coeff(int n, int m, int l);

}  // namespace cflow

#endif
