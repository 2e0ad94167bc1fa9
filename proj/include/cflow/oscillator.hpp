#ifndef CFLOW_OSCILLATOR_HPP
#define CFLOW_OSCILLATOR_HPP

#include <array>
#include <utility>
#include <vector>

#include "cflow/specfun.hpp"

namespace cflow {

struct OscParams {
    int N = 0;
    double gamma = 0.0;
    cplx E{0.0, 0.0};

    void validate() const;
    // (i gamma)^{2N} = (-1)^N gamma^{2N}; zero when gamma == 0 so that the
    // N -> 0, gamma -> 0 limit of the recurrence is the Hermite one.
    cplx coupling() const;
};

struct SeriesSolution {
    OscParams params;
    std::vector<cplx> coeffs;  // c_0 .. c_{n_max}
    cplx theta_const{0.0, 0.0};
    int n_max = 0;
};

SeriesSolution frobenius_coeffs(const OscParams& params, std::pair<cplx, cplx> seeds = {1.0, 0.0},
                                cplx theta_const = 0.0, int n_max = 20);

double convergence_ratio(const OscParams& params, cplx theta_const, int n, int bigN);

// The four incomplete-gamma pieces and the four polynomial-in-t pieces of theta(t);
// theta = sum(gamma_terms) + sum(algebraic_terms).
struct ThetaParts {
    std::array<cplx, 4> gamma_terms{};
    std::array<cplx, 4> algebraic_terms{};
    cplx total() const;
};

struct PhaseConstants {
    double a, b, c, d, k;
};

PhaseConstants phase_constants(int N);
std::array<double, 4> theta_gamma_orders(int N);  // s arguments of Gamma_1..Gamma_4
ThetaParts theta_parts(const OscParams& params, cplx t);
cplx theta_phase(const OscParams& params, cplx t);

struct PhaseSample {
    cplx t;
    cplx theta;
};

struct PhaseSolution {
    OscParams params;
    std::vector<PhaseSample> samples;
    PhaseConstants constants{};
    bool constant = false;  // theta(x) == theta0 everywhere (used for N = 0)
    cplx theta0{0.0, 0.0};
};

PhaseSolution phase_solution(const OscParams& params, const std::vector<cplx>& t_samples);
PhaseSolution constant_phase(const OscParams& params, cplx theta0);
cplx phase_at(const PhaseSolution& phase, cplx x);  // theta at t = x^{2N+2}/a

struct WaveValue {
    cplx psi;
    double last_term_ratio = 0.0;
    bool truncation_warning = false;
};

// Throws TruncationWarning when strict and the last retained term exceeds 1e-8 of the sum.
WaveValue assemble_wavefunction(cplx x, const SeriesSolution& sol, const PhaseSolution& phase, bool strict = false);

struct PhaseOdeSample {
    double x;
    cplx theta;
    cplx dtheta;
};

std::vector<PhaseOdeSample> unitary_phase_ode_solve(double c1_mod2, const std::vector<double>& x_grid,
                                                    cplx theta0 = 0.0, cplx dtheta0 = 0.0);

cplx rho_omega(double omega, double k, const PrecisionPolicy& policy = {});

}  // namespace cflow

#endif
