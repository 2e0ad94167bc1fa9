#include "cflow/oscillator.hpp"

#include <Eigen/Sparse>
#include <cmath>

#include "cflow/ode.hpp"

namespace cflow {

void OscParams::validate() const {
    if (N < 0) throw ValidationError("N must be >= 0");
    if (!(gamma >= 0.0)) throw ValidationError("gamma must be >= 0");
}

cplx OscParams::coupling() const {
    if (gamma == 0.0) return 0.0;
    const double sign = (N % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(gamma, 2 * N);
}

SeriesSolution frobenius_coeffs(const OscParams& params, std::pair<cplx, cplx> seeds, cplx theta, int n_max) {
    params.validate();
    if (n_max < 2) throw ValidationError("n_max must be >= 2");
    const int N = params.N;
    const int rows = n_max - 1;
    const cplx seed[2] = {seeds.first, seeds.second};

    std::vector<Eigen::Triplet<cplx>> entries;
    VecXc rhs = VecXc::Zero(rows);
    auto add = [&](int row, int m, cplx coeff) {
        if (m < 0 || m > n_max) return;
        if (m <= 1)
            rhs[row] -= coeff * seed[m];
        else
            entries.emplace_back(row, m - 2, coeff);
    };

    const cplx e_lhs = std::exp(-2.0 * (N + 1) * theta);
    const cplx e_m2 = std::exp(-2.0 * I * double(N) * theta);
    const cplx e_m4 = std::exp(-I * double(4 * N + 2) * theta) / double((2 * N + 1) * (2 * N + 1));
    const cplx g = params.coupling();
    for (int n = 0; n <= n_max - 2; ++n) {
        const double D = double(n + 1) * double(n + 2);
        add(n, n + 2, 1.0);
        add(n, n + 2 * N, double(n - 2 * N) / D * e_lhs);
        add(n, n - 2, -e_m2 / D);
        add(n, n - 4 * N - 2, e_m4 / D);
        add(n, n - 2 * N, -g / D);
        add(n, n, -params.E / D);
    }

    Eigen::SparseMatrix<cplx> A(rows, rows);
    A.setFromTriplets(entries.begin(), entries.end());
    A.makeCompressed();

    VecXc x;
    if (N <= 1) {
        // c_{n+2N} never sits above c_{n+2}: forward substitution, exact on terminating series.
        for (int i = 0; i < rows; ++i)
            if (A.coeff(i, i) == 0.0) throw SingularSystem("zero pivot for c_" + std::to_string(i + 2));
        x = A.triangularView<Eigen::Lower>().solve(rhs);
    } else {
        Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success) throw SingularSystem("recurrence system is rank-deficient");
        x = lu.solve(rhs);
        if (lu.info() != Eigen::Success) throw SingularSystem("recurrence solve failed");
    }
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i].real()) || !std::isfinite(x[i].imag()))
            throw SingularSystem("recurrence system is numerically singular");

    SeriesSolution sol;
    sol.params = params;
    sol.theta_const = theta;
    sol.n_max = n_max;
    sol.coeffs.resize(n_max + 1);
    sol.coeffs[0] = seed[0];
    sol.coeffs[1] = seed[1];
    for (int m = 2; m <= n_max; ++m) sol.coeffs[m] = x[m - 2];
    return sol;
}

double convergence_ratio(const OscParams& params, cplx theta, int n, int bigN) {
    if (!(params.gamma > 0.0)) throw DomainError("convergence_ratio needs gamma > 0");
    const cplx ig2 = ((bigN % 2 == 0) ? 1.0 : -1.0) * std::pow(params.gamma, 2 * bigN);
    return std::abs(double(n - 2 * bigN) / ig2 * std::exp(-2.0 * I * theta));
}

PhaseConstants phase_constants(int N) {
    const double n = N;
    return {(2 * n + 1) * (2 * n + 2), (1 - 2 * n) / (2 * n + 2), (2 * n + 1) / (2 * n + 2), 1 / (n + 1), 2 * n + 1};
}

std::array<double, 4> theta_gamma_orders(int N) {
    const double n = N;
    return {(4 * n + 3) / (2 * n + 2), 1 / (2 * n + 2), 2 / (2 * n + 1), n / (n + 1)};
}

cplx ThetaParts::total() const {
    cplx s = 0.0;
    for (const auto& v : gamma_terms) s += v;
    for (const auto& v : algebraic_terms) s += v;
    return s;
}

ThetaParts theta_parts(const OscParams& params, cplx t) {
    params.validate();
    if (params.N < 1) throw DomainError("the closed-form phase needs N >= 1");
    const int N = params.N;
    const auto [a, b, c, d, k] = phase_constants(N);
    const auto s = theta_gamma_orders(N);
    const cplx E = params.E;
    const cplx g = params.coupling();
    ThetaParts p;
    if (t == 0.0) {
        // t -> 0: polynomial prefactors vanish, the t^c (a t)^{-c} style products stay finite.
        p.gamma_terms[1] = -E * k * std::pow(a, -c) * gamma(s[1]);
        p.gamma_terms[2] = -0.5 * k * std::pow(a, b) * std::exp(-I * pi * b) * gamma(s[2]);
        p.gamma_terms[3] = -k * g * std::pow(a, -d) * gamma(s[3]);
        return p;
    }
    const cplx at = a * t;
    const cplx et = std::exp(-t);
    // -t for real t > 0 must sit on the upper lip (arg = +pi), not carry a -0.0 imaginary part
    const cplx mt(-t.real(), t.imag() == 0.0 ? 0.0 : -t.imag());
    const double n1 = N + 1;
    const cplx G1 = upper_incomplete_gamma(s[0], mt);
    const cplx G2 = upper_incomplete_gamma(s[1], mt);
    const cplx G3 = upper_incomplete_gamma(s[2], mt);
    const cplx G4 = upper_incomplete_gamma(s[3], mt);
    const double den1 = (2.0 * N + 1) * (4.0 * N + 3);

    p.algebraic_terms[0] = -cpow(at, c) * (-2.0 * n1 * t) / den1;
    p.gamma_terms[0] = -cpow(at, c) * (4.0 * N + 3) * et * G1 / den1;
    p.algebraic_terms[1] = -E * k * cpow(at, -c) * (-2.0 * n1 * t);
    p.gamma_terms[1] = -E * k * cpow(at, -c) * et * cpow(t, c) * G2;
    p.algebraic_terms[2] = -0.5 * k * cpow(at, b) * (-(2.0 * N + 1) * t);
    p.gamma_terms[2] = -0.5 * k * cpow(at, b) * et * cpow(mt, -b) * G3;
    p.algebraic_terms[3] = -k * g * cpow(at, -d) * (-n1 * t) / double(N);
    p.gamma_terms[3] = -k * g * cpow(at, -d) * et * cpow(t, d) * double(N) * G4 / double(N);
    return p;
}

cplx theta_phase(const OscParams& params, cplx t) { return theta_parts(params, t).total(); }

PhaseSolution phase_solution(const OscParams& params, const std::vector<cplx>& t_samples) {
    PhaseSolution ph;
    ph.params = params;
    ph.constants = phase_constants(params.N);
    ph.samples.reserve(t_samples.size());
    for (const auto& t : t_samples) ph.samples.push_back({t, theta_phase(params, t)});
    return ph;
}

PhaseSolution constant_phase(const OscParams& params, cplx theta0) {
    PhaseSolution ph;
    ph.params = params;
    ph.constants = phase_constants(params.N);
    ph.constant = true;
    ph.theta0 = theta0;
    return ph;
}

cplx phase_at(const PhaseSolution& phase, cplx x) {
    if (phase.constant) return phase.theta0;
    const int N = phase.params.N;
    const cplx t = std::pow(x, 2 * N + 2) / phase.constants.a;
    return theta_parts(phase.params, t).total();
}

WaveValue assemble_wavefunction(cplx x, const SeriesSolution& sol, const PhaseSolution& phase, bool strict) {
    WaveValue out;
    if (x == 0.0) {
        out.psi = sol.coeffs.front();
        return out;
    }
    const int N = sol.params.N;
    const double a = (2.0 * N + 1) * (2.0 * N + 2);
    const cplx rot = std::exp(I * phase_at(phase, x));
    cplx sum = 0.0, term = 0.0, xn = 1.0, rn = 1.0;
    for (int n = 0; n <= sol.n_max; ++n) {
        term = sol.coeffs[n] * xn * rn;
        sum += term;
        xn *= x;
        rn *= rot;
    }
    if (!std::isfinite(std::abs(sum)))
        throw Overflow("series overflows at |x| = " + std::to_string(std::abs(x)) + " (|e^{i theta}| = " +
                       std::to_string(std::abs(rot)) + ")");
    out.psi = std::exp(-std::pow(x, 2 * N + 2) / a) * sum;
    out.last_term_ratio = sum == 0.0 ? 0.0 : std::abs(term) / std::abs(sum);
    out.truncation_warning = out.last_term_ratio > 1e-8;
    if (strict && out.truncation_warning)
        throw TruncationWarning("last retained term is " + std::to_string(out.last_term_ratio) + " of the sum");
    return out;
}

std::vector<PhaseOdeSample> unitary_phase_ode_solve(double c1_mod2, const std::vector<double>& x_grid, cplx theta0,
                                                    cplx dtheta0) {
    for (std::size_t i = 1; i < x_grid.size(); ++i)
        if (!(x_grid[i] > x_grid[i - 1])) throw ValidationError("x_grid must be strictly increasing");
    auto rhs = [c1_mod2](double x, const Vec2c& y) {
        Vec2c d;
        d << y[1], -I * x * y[1] - (c1_mod2 - x * x);
        return d;
    };
    OdeOptions opt;
    opt.rtol = 1e-11;
    opt.atol = 1e-13;
    Vec2c y0;
    y0 << theta0, dtheta0;
    const auto run = rk4_adaptive(rhs, x_grid, y0, opt);
    std::vector<PhaseOdeSample> out;
    out.reserve(run.y.size());
    for (std::size_t i = 0; i < run.y.size(); ++i) out.push_back({x_grid[i], run.y[i][0], run.y[i][1]});
    return out;
}

cplx rho_omega(double omega, double k, const PrecisionPolicy& policy) {
    if (k == 0.0) throw DomainError("rho_omega needs k != 0");
    const double w32 = std::pow(std::fabs(omega), 1.5);
    const double pref = 2.0 * w32 / (3.0 * std::sqrt(3.0));
    const cplx x_bei = pref / std::sqrt(I * k * k);
    const double x_j = pref / std::pow(k * k * k * k, 0.25);
    const double z = std::pow(omega, 6) / (std::pow(2.18, 3) * std::pow(k, 4));
    const cplx bei = kelvin_bei(-1.0 / 3.0, x_bei, policy);
    const cplx jb = bessel(BesselKind::J, -1.0 / 3.0, x_j, policy);
    const cplx f14 = pfq({1.0}, {7.0 / 6.0, 4.0 / 3.0, 5.0 / 3.0, 11.0 / 6.0}, z, policy);
    return bei + jb + f14;
}

}  // namespace cflow
