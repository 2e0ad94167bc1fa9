#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "cflow/analysis.hpp"
#include "cflow/bethe.hpp"
#include "cflow/cli.hpp"
#include "cflow/oscillator.hpp"
#include "cflow/rgflow.hpp"
#include "cflow/specfun.hpp"

namespace cflow::cli {

namespace {

using json = nlohmann::ordered_json;

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
    void row(const std::vector<double>& v) {
        std::vector<std::string> s;
        for (double d : v) s.push_back(num(d));
        rows_.push_back(std::move(s));
    }
    void raw(std::vector<std::string> v) { rows_.push_back(std::move(v)); }
    std::string str() const {
        std::ostringstream o;
        auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << r[i];
            o << "\n";
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return o.str();
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("key 'out': cannot write '" + path + "'");
    f << text;
}

// Primary output to `out` (or the stream when empty); secondaries only beside a file.
struct Sink {
    const RunConfig& cfg;
    std::ostream& stream;

    void primary(const std::string& text) const {
        if (cfg.out_path.empty())
            stream << text;
        else
            write_file(cfg.out_path, text);
    }
    void secondary(const std::string& suffix, const std::string& text) const {
        if (cfg.out_path.empty()) return;
        std::string stem = cfg.out_path;
        const auto slash = stem.find_last_of('/');
        const auto dot = stem.find_last_of('.');
        if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) stem.erase(dot);
        write_file(stem + suffix, text);
    }
};

int cmd_eval(const RunConfig& cfg, const Sink& sink) {
    PrecisionPolicy pol;
    pol.rel_tol = cfg.real("rel_tol");
    pol.validate();
    const std::string f = cfg.str("func");
    cplx v;
    if (f == "gamma_inc")
        v = upper_incomplete_gamma(cfg.complex("s"), cfg.complex("z"), pol);
    else if (f == "hyp2f1")
        v = hyp2f1(cfg.complex("a"), cfg.complex("b"), cfg.complex("c"), cfg.complex("z"), pol);
    else if (f == "pfq")
        v = pfq(cfg.complexes("numer"), cfg.complexes("denom"), cfg.complex("z"), pol);
    else if (f == "bessel") {
        const std::string k = cfg.str("kind");
        const BesselKind kind = k == "J" ? BesselKind::J : k == "Y" ? BesselKind::Y : k == "I" ? BesselKind::I : BesselKind::K;
        v = bessel(kind, cfg.real("nu"), cfg.complex("z"), pol);
    } else if (f == "erfi")
        v = erfi(cfg.real("x"));
    else if (f == "bei")
        v = kelvin_bei(cfg.real("nu"), cfg.real("x"), pol);
    else
        v = poly_via_2f1(cfg.complex("z"), int(cfg.integer("n")), pol);
    json j;
    j["func"] = f;
    j["value"] = cjson(v);
    sink.primary(j.dump(2) + "\n");
    return 0;
}

int cmd_oscillator(const RunConfig& cfg, const Sink& sink, std::ostream& err) {
    OscParams p;
    p.N = int(cfg.integer("N"));
    p.gamma = cfg.real("gamma");
    p.E = cfg.complex("E");
    const cplx theta = cfg.complex("theta");
    const auto sol = frobenius_coeffs(p, {cfg.complex("c0"), cfg.complex("c1")}, theta, int(cfg.integer("n_max")));
    Csv coeffs({"n", "re_c", "im_c"});
    for (std::size_t n = 0; n < sol.coeffs.size(); ++n) coeffs.row({double(n), sol.coeffs[n].real(), sol.coeffs[n].imag()});
    sink.primary(coeffs.str());

    const PhaseSolution phase = p.N == 0 ? constant_phase(p, theta) : phase_solution(p, {});
    Csv psi({"x", "re_psi", "im_psi", "last_term_ratio", "truncation_warning"});
    int warnings = 0;
    for (double x : cfg.reals("x_values")) {
        const auto w = assemble_wavefunction(x, sol, phase, cfg.flag("strict"));
        warnings += w.truncation_warning;
        psi.row({x, w.psi.real(), w.psi.imag(), w.last_term_ratio, double(w.truncation_warning)});
    }
    sink.secondary("_psi.csv", psi.str());
    if (warnings) err << "warning: " << warnings << " wavefunction samples flagged for truncation\n";
    return 0;
}

int cmd_bethe(const RunConfig& cfg, const Sink& sink) {
    const int n = int(cfg.integer("n")), N = int(cfg.integer("N"));
    const auto roots = solve_bethe_roots(n, N, std::nullopt, cfg.real("tol"));
    json j;
    j["n"] = n;
    j["N"] = N;
    j["residual"] = roots.residual;
    j["iterations"] = roots.iterations;
    j["roots"] = json::array();
    for (const auto& r : roots.roots) j["roots"].push_back(cjson(r));
    sink.primary(j.dump(2) + "\n");

    const auto rp = riccati_params(N, cfg.complex("a"));
    Csv scan({"x", "re_px", "im_px", "re_ptheta", "im_ptheta", "re_p", "im_p"});
    const double x0 = cfg.real("x_min"), x1 = cfg.real("x_max");
    const long pts = cfg.integer("points");
    for (long i = 0; i < pts; ++i) {
        const double x = x0 + (x1 - x0) * double(i) / double(pts - 1);
        try {
            const auto m = quasi_momentum(x, roots, rp);
            const cplx t = m.total();
            scan.row({x, m.p_x.real(), m.p_x.imag(), m.p_theta.real(), m.p_theta.imag(), t.real(), t.imag()});
        } catch (const PoleError&) {
            const double nan = std::nan("");
            scan.row({x, nan, nan, nan, nan, nan, nan});
        }
    }
    sink.secondary("_momentum.csv", scan.str());
    return 0;
}

const std::vector<std::string> traj_header = {"s",      "re_tau",   "im_tau",    "re_ginv",     "im_ginv",
                                              "re_gamma", "im_gamma", "invariant", "im_invariant"};

void traj_rows(Csv& csv, const Trajectory& t) {
    for (std::size_t i = 0; i < t.states.size(); ++i) {
        const auto& s = t.states[i];
        const double sv = i < t.s.size() ? t.s[i] : double(i);
        csv.row({sv, s.tau.real(), s.tau.imag(), s.g_inv.real(), s.g_inv.imag(), s.gamma.real(), s.gamma.imag(),
                 s.aux.real(), s.aux.imag()});
    }
}

int cmd_flow(const RunConfig& cfg, const Sink& sink, std::ostream& err) {
    const std::string v = cfg.str("variant");
    const int N = int(cfg.integer("N"));
    const int steps = int(cfg.integer("steps"));
    Csv csv(traj_header);
    const FlowState init{0.0, cfg.complex("ginv0"), cfg.complex("gamma0")};
    try {
        if (v == "tau-recursion") {
            Trajectory t;
            t.states.push_back(init);
            t.s.push_back(0.0);
            try {
                for (int i = 1; i <= steps; ++i) {
                    t.states.push_back(tau_step_recursion(t.states.back()));
                    t.s.push_back(i);
                }
            } catch (const Error& e) {
                if (!e.numeric()) throw;
                traj_rows(csv, t);
                csv.raw({"error", num(t.states.back().tau.real() + 1.0), "0", "nan", "nan", "nan", "nan", "nan", "nan"});
                sink.primary(csv.str());
                err << e.what() << "\n";
                return 2;
            }
            traj_rows(csv, t);
        } else if (v == "one-loop-v1" || v == "one-loop-v2") {
            const double g0 = cfg.real("gamma_min"), g1 = cfg.real("gamma_max");
            if (!(g1 > g0)) throw ValidationError("key 'gamma_max': must exceed gamma_min");
            std::vector<double> grid;
            for (int i = 0; i <= steps; ++i) grid.push_back(g0 + (g1 - g0) * i / steps);
            traj_rows(csv, one_loop_invariant_flow(v == "one-loop-v1" ? OneLoopVariant::separated_v1
                                                                      : OneLoopVariant::appendix_v2,
                                                   grid, cfg.real("C"), cfg.flag("complex_mode")));
        } else if (v == "n-power" || v == "lr") {
            const auto contour = ray_contour(cfg.real("contour_angle"), cfg.real("s_max"), steps);
            traj_rows(csv, v == "n-power" ? n_power_flow(init, N, contour) : lr_flow(init, N, cfg.real("nu"), contour));
        } else {
            const auto g0 = cfg.complexes("g0");
            const auto tau = cfg.reals("tau");
            if (g0.size() != tau.size()) throw ValidationError("key 'tau': must have as many entries as g0");
            const auto g = continued_fraction_rg(g0, tau, int(cfg.integer("depth")));
            for (std::size_t i = 0; i < g.size(); ++i)
                csv.row({double(i), tau[i], 0.0, g[i].real(), g[i].imag(), 0.0, 0.0, 0.0, 0.0});
        }
    } catch (const BlowUp& b) {
        traj_rows(csv, b.partial);
        csv.raw({"blowup", num(b.tau_star.real()), num(b.tau_star.imag()), "inf", "inf", "nan", "nan", "nan", "nan"});
        sink.primary(csv.str());
        err << b.what() << " at tau* = " << num(b.tau_star.real()) << (b.tau_star.imag() < 0 ? "" : "+")
            << num(b.tau_star.imag()) << "i\n";
        return 2;
    }
    sink.primary(csv.str());
    return 0;
}

std::vector<cplx> csv_points(const std::string& path, const std::string& xc, const std::string& yc) {
    const auto t = read_csv(path);
    auto col = [&](const std::string& name) {
        const auto it = std::find(t.header.begin(), t.header.end(), name);
        if (it == t.header.end()) throw SchemaError(path + ": missing column '" + name + "'");
        return std::size_t(it - t.header.begin());
    };
    const std::size_t ix = col(xc), iy = col(yc);
    std::vector<cplx> pts;
    for (const auto& r : t.rows) {
        if (r.size() != t.header.size()) throw SchemaError(path + ": ragged row");
        char* e1 = nullptr;
        char* e2 = nullptr;
        const double x = std::strtod(r[ix].c_str(), &e1), y = std::strtod(r[iy].c_str(), &e2);
        // marker rows (blowup / error) and poles are skipped
        if (*e1 || *e2 || r[ix].empty() || r[iy].empty() || !std::isfinite(x) || !std::isfinite(y)) continue;
        if (!r.empty()) {
            char* e0 = nullptr;
            std::strtod(r[0].c_str(), &e0);
            if (*e0) continue;
        }
        pts.emplace_back(x, y);
    }
    if (pts.empty()) throw SchemaError(path + ": no data rows");
    return pts;
}

int cmd_cycle(const RunConfig& cfg, const Sink& sink) {
    const std::string in = cfg.str("input");
    if (in.empty()) throw ValidationError("key 'input': a trajectory CSV is required");
    const auto pts = csv_points(in, cfg.str("x_col"), cfg.str("y_col"));
    const auto rep = detect_limit_cycle(pts, cfg.real("tol"));
    json j;
    j["closed"] = rep.closed;
    j["winding"] = rep.winding;
    j["winding_raw"] = rep.winding_raw;
    j["period_estimate"] = rep.period_estimate;
    j["min_return_distance"] = rep.min_return_distance;
    j["spiral_c"] = rep.spiral_c ? json(*rep.spiral_c) : json(nullptr);
    j["spiral_residual"] = rep.spiral_residual ? json(*rep.spiral_residual) : json(nullptr);
    j["enclosed_area"] = enclosed_area(pts);
    sink.primary(j.dump(2) + "\n");
    if (!cfg.str("svg").empty()) write_file(cfg.str("svg"), render_svg({in}, cfg.str("x_col"), cfg.str("y_col")));
    return 0;
}

int threads_cap(std::size_t jobs) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CFLOW_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end || v < 1) throw ValidationError("CFLOW_THREADS must be a positive integer");
        n = unsigned(v);
    }
    return int(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

int cmd_phase(const RunConfig& cfg, const Sink& sink) {
    const auto Ns = cfg.reals("N_values");
    if (Ns.empty()) throw ValidationError("key 'N_values': must not be empty");
    for (double N : Ns)
        if (!(N > 0.0)) throw ValidationError("key 'N_values': entries must be positive");
    PhaseScanOptions opt;
    opt.n_max = int(cfg.integer("n_max"));
    opt.beta_T = cfg.real("beta_T");
    const double gamma = cfg.real("gamma"), E0 = cfg.real("E0"), nu = cfg.real("nu");
    const cplx k = cfg.complex("k");
    if (nu == 0.0) throw ValidationError("key 'nu': must be nonzero");

    // one N per job, each result in its own slot: output order never depends on scheduling
    std::vector<PhasePoint> pts(Ns.size());
    std::vector<std::string> errors(Ns.size());
    const int nt = threads_cap(Ns.size());
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < Ns.size(); i += nt) {
                try {
                    pts[i] = phase_diagram_scan({Ns[i]}, gamma, E0, k, nu, opt).front();
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (!e.empty()) throw NoConvergence("phase scan: " + e);

    Csv csv({"N", "scale", "re_ginv", "im_ginv", "re_beta", "im_beta", "re_gamma_tilde", "im_gamma_tilde", "critical",
             "divergent", "complex_branch", "exponent_fit", "fit_r2", "branch_monotone"});
    const double nan = std::nan("");
    json fit;
    fit["gamma"] = gamma;
    fit["E0"] = E0;
    fit["k"] = cjson(k);
    fit["nu"] = nu;
    fit["points"] = json::array();
    std::vector<double> xs, ys;
    for (const auto& p : pts) {
        csv.row({p.N, p.scale, p.g_inv.real(), p.g_inv.imag(), p.beta.real(), p.beta.imag(), p.gamma_tilde.real(),
                 p.gamma_tilde.imag(), double(p.critical), double(p.divergent), double(p.complex_branch),
                 p.exponent_fit.value_or(nan), p.fit_r2.value_or(nan),
                 p.branch_monotone ? double(*p.branch_monotone) : nan});
        json e;
        e["N"] = p.N;
        e["critical"] = p.critical;
        e["exponent_fit"] = p.exponent_fit ? json(*p.exponent_fit) : json(nullptr);
        e["fit_r2"] = p.fit_r2 ? json(*p.fit_r2) : json(nullptr);
        e["branch_monotone"] = p.branch_monotone ? json(*p.branch_monotone) : json(nullptr);
        fit["points"].push_back(e);
        if (p.critical && !p.divergent && p.scale > 0.0) {
            xs.push_back(p.N);
            ys.push_back(p.scale);
        }
    }
    if (xs.size() >= 3) {
        const auto pl = power_law_fit(xs, ys);
        fit["scale_vs_N"] = {{"exponent", pl.exponent}, {"prefactor", pl.prefactor}, {"r2", pl.r2}};
    } else {
        fit["scale_vs_N"] = nullptr;
    }
    sink.primary(csv.str());
    sink.secondary("_fit.json", fit.dump(2) + "\n");
    return 0;
}

int cmd_wetterich(const RunConfig& cfg, const Sink& sink) {
    WetterichParams p;
    p.omega = cfg.real("omega");
    p.gamma = cfg.real("gamma");
    p.delta = cfg.real("delta");
    p.Lambda = cfg.real("Lambda");
    p.N = int(cfg.integer("N"));
    const std::string m = cfg.str("mode");
    auto eval = [&](const WetterichParams& q) -> cplx {
        if (m == "real_osc") return wetterich_ground_energy(q, WetterichMode::real_osc);
        if (m == "perturbed") return wetterich_ground_energy(q, WetterichMode::perturbed);
        if (m == "complex_osc") return wetterich_ground_energy(q, WetterichMode::complex_osc);
        if (m == "u_n1") return u_eff(q, UeffMode::n1);
        if (m == "u_n2") return u_eff(q, UeffMode::n2);
        if (m == "u_omega0_split") return u_eff(q, UeffMode::omega0_split);
        return u_eff(q, UeffMode::n_infinity);
    };
    const auto lams = cfg.reals("Lambda_values");
    if (lams.empty()) {
        json j;
        j["mode"] = m;
        j["value"] = cjson(eval(p));
        sink.primary(j.dump(2) + "\n");
        return 0;
    }
    Csv csv({"Lambda", "re", "im"});
    for (double L : lams) {
        WetterichParams q = p;
        q.Lambda = L;
        const cplx v = eval(q);
        csv.row({L, v.real(), v.imag()});
    }
    sink.primary(csv.str());
    return 0;
}

int cmd_render(const RunConfig& cfg, const Sink& sink) {
    const std::string in = cfg.str("input");
    if (in.empty()) throw ValidationError("key 'input': a trajectory CSV is required");
    std::vector<std::string> paths{in};
    for (const auto& o : cfg.strings("overlay")) paths.push_back(o);
    sink.primary(render_svg(paths, cfg.str("x_col"), cfg.str("y_col")));
    return 0;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("key 'input': cannot open '" + path + "'");
    CsvTable t;
    std::string line;
    auto split = [](const std::string& l) {
        std::vector<std::string> out;
        std::stringstream ss(l);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
            out.push_back(cell);
        }
        if (!l.empty() && l.back() == ',') out.emplace_back();
        return out;
    };
    while (std::getline(f, line)) {
        if (line.empty() || line == "\r") continue;
        if (t.header.empty())
            t.header = split(line);
        else
            t.rows.push_back(split(line));
    }
    if (t.header.empty()) throw SchemaError(path + ": empty CSV (no header)");
    return t;
}

std::string render_svg(const std::vector<std::string>& csv_paths, const std::string& x_col, const std::string& y_col) {
    std::vector<std::vector<cplx>> series;
    for (const auto& p : csv_paths) series.push_back(csv_points(p, x_col, y_col));
    double x0 = series[0][0].real(), x1 = x0, y0 = series[0][0].imag(), y1 = y0;
    for (const auto& s : series)
        for (const auto& z : s) {
            x0 = std::min(x0, z.real());
            x1 = std::max(x1, z.real());
            y0 = std::min(y0, z.imag());
            y1 = std::max(y1, z.imag());
        }
    if (x1 - x0 == 0.0) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 == 0.0) y0 -= 0.5, y1 += 0.5;
    const double W = 640, H = 480, M = 48;
    auto px = [&](double x) { return M + (x - x0) / (x1 - x0) * (W - 2 * M); };
    auto py = [&](double y) { return H - M - (y - y0) / (y1 - y0) * (H - 2 * M); };
    auto f = [](double v) {
        char b[32];
        std::snprintf(b, sizeof b, "%.3f", v);
        return std::string(b);
    };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
    o << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
    o << "<g id=\"axes\" stroke=\"#444\" stroke-width=\"1\">\n";
    const double ax = (x0 <= 0.0 && 0.0 <= x1) ? px(0.0) : M;
    const double ay = (y0 <= 0.0 && 0.0 <= y1) ? py(0.0) : H - M;
    o << "<line x1=\"" << f(M) << "\" y1=\"" << f(ay) << "\" x2=\"" << f(W - M) << "\" y2=\"" << f(ay) << "\"/>\n";
    o << "<line x1=\"" << f(ax) << "\" y1=\"" << f(M) << "\" x2=\"" << f(ax) << "\" y2=\"" << f(H - M) << "\"/>\n";
    o << "</g>\n";
    o << "<text x=\"" << f(W - M) << "\" y=\"" << f(H - 12) << "\" font-size=\"12\" text-anchor=\"end\">" << x_col
      << " [" << num(x0) << ", " << num(x1) << "]</text>\n";
    o << "<text x=\"12\" y=\"" << f(M - 16) << "\" font-size=\"12\">" << y_col << " [" << num(y0) << ", " << num(y1)
      << "]</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        o << "<polyline id=\"traj" << k << "\" fill=\"none\" stroke=\"" << colors[k % 6]
          << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[k].size(); ++i)
            o << (i ? " " : "") << f(px(series[k][i].real())) << "," << f(py(series[k][i].imag()));
        o << "\"/>\n";
    }
    o << "</svg>\n";
    return o.str();
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Sink sink{cfg, out};
    if (!cfg.out_path.empty()) write_file(cfg.out_path + ".cfg", canonical_echo(cfg));
    const std::string& s = cfg.subcommand;
    if (s == "eval") return cmd_eval(cfg, sink);
    if (s == "oscillator") return cmd_oscillator(cfg, sink, err);
    if (s == "bethe") return cmd_bethe(cfg, sink);
    if (s == "flow") return cmd_flow(cfg, sink, err);
    if (s == "cycle") return cmd_cycle(cfg, sink);
    if (s == "phase") return cmd_phase(cfg, sink);
    if (s == "wetterich") return cmd_wetterich(cfg, sink);
    if (s == "render_svg") return cmd_render(cfg, sink);
    throw ValidationError("unknown subcommand '" + s + "'");
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
        return run(parse_args(argc, argv), out, err);
    } catch (const Error& e) {
        err << e.what() << "\n";
        return e.numeric() ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace cflow::cli
