#ifndef CFLOW_ANALYSIS_HPP
#define CFLOW_ANALYSIS_HPP

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "cflow/specfun.hpp"

namespace cflow {

struct CycleReport {
    bool closed = false;
    int winding = 0;
    double winding_raw = 0.0;
    double period_estimate = 0.0;  // samples between start and nearest return
    double min_return_distance = 0.0;
    std::optional<double> spiral_c;
    std::optional<double> spiral_residual;
};

CycleReport detect_limit_cycle(const std::vector<cplx>& traj, double tol = 1e-3);

// Green-theorem diagnostic: signed area enclosed by the closed polyline.
double enclosed_area(const std::vector<cplx>& traj);

struct SpiralFit {
    double c = 0.0;
    double residual = 0.0;
};

// ln t = ln c - theta, slope fixed at -1.
SpiralFit spiral_invariant_fit(const std::vector<std::pair<double, double>>& theta_t);

double coupling_angle_slope(double g, double theta, int n);

struct PortraitOptions {
    double h = 1e-4;            // arc-length step
    double max_length = 20.0;   // per direction
    double box = 4.0;           // stop once |z| exceeds this
    double stop_radius = 3e-4;  // stop this close to a singular point of the slope field
};

// Integral curve of dx/dy = coupling_angle_slope through z0, traced both ways.
// The line field is oriented continuously (atan2 branch of the same slope), which
// makes it a smooth vector field off the points z = 0, z = 1, z^n = 1.
std::vector<cplx> coupling_portrait_orbit(int n, cplx z0, const PortraitOptions& opt = {});

// Start points used for the odd/even closed-orbit count.
std::vector<cplx> portrait_start_grid();
int count_closed_portrait_orbits(int n, double tol = 1e-3, const PortraitOptions& opt = {});

cplx spectrum_variance(const std::vector<cplx>& eigs);

struct Contraction {
    double value = 0.0;
    bool metric_positive_definite = false;
};

Contraction c_flow_contraction(const std::vector<double>& betas, const Eigen::MatrixXd& metric);

struct MatsubaraScale {
    cplx n_B;
    cplx T_B;
    cplx tau;
    bool complex_branch = false;
};

cplx matsubara_nb(double gamma, double C);
cplx matsubara_tb(double gamma, double C, double E);
cplx matsubara_tau(double gamma, double C);
MatsubaraScale matsubara_scale(double gamma, double C, double E);

struct PhasePoint {
    double N = 0.0;
    double scale = 0.0;  // |beta|
    cplx g_inv;
    cplx beta;
    cplx gamma_tilde;
    bool critical = false;  // integer N
    bool divergent = false;
    bool complex_branch = false;
    std::optional<double> exponent_fit;
    std::optional<double> fit_r2;
    std::optional<bool> branch_monotone;
};

struct PhaseScanOptions {
    int n_max = 256;      // Matsubara modes -n_max..n_max
    double beta_T = 1.0;  // omega_m = 2 pi m / beta_T
    int branch_points = 17;
};

// Matsubara sum sum_m 1/(E0 - i omega_m) with the 1/m^2 tail added.
cplx matsubara_propagator_sum(double E0, const PhaseScanOptions& opt = {});
cplx phase_g_inv(double N, double gamma, double E0, double nu, const PhaseScanOptions& opt = {});
// Advanced-form scale for real (possibly fractional) N, principal powers.
cplx lr_beta_real_N(cplx g_inv, cplx k, double N);

std::vector<PhasePoint> phase_diagram_scan(const std::vector<double>& N_values, double gamma, double E0, cplx k,
                                           double nu, const PhaseScanOptions& opt = {});

struct PowerLaw {
    double exponent = 0.0;
    double prefactor = 0.0;
    double r2 = 0.0;
};

PowerLaw power_law_fit(const std::vector<double>& xs, const std::vector<double>& ys);

double wavefn_z_relation(double z_r);
// dZ_L/dZ_R of Z_L = e^{Z_R}
double wavefn_z_derivative(double z_r);
// dZ_R/dZ_L as printed next to the relation: e^{Z_R+Z_L}/e^{Z_L-Z_R}
double wavefn_z_printed_slope(double z_r, double z_l);

}  // namespace cflow

#endif
