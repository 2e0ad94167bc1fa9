#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

#include "cflow/cli.hpp"
#include "cflow/errors.hpp"

namespace cflow::cli {

namespace {

enum class Type { Int, Real, Complex, Bool, Enum, RealList, ComplexList, Path, PathList };

struct KeySpec {
    std::string name;
    Type type;
    std::string def;
    std::optional<double> lo{};
    bool strict = false;  // lo is exclusive
    std::vector<std::string> choices{};
};


const std::map<std::string, std::vector<KeySpec>>& schema() {
    static const std::map<std::string, std::vector<KeySpec>> s = {
        {"eval",
         {{"func", Type::Enum, "gamma_inc", {}, false, {"gamma_inc", "hyp2f1", "pfq", "bessel", "erfi", "bei", "poly_2f1"}},
          {"s", Type::Complex, "0.5"},
          {"z", Type::Complex, "0.5"},
          {"a", Type::Complex, "1"},
          {"b", Type::Complex, "1"},
          {"c", Type::Complex, "2"},
          {"numer", Type::ComplexList, "1"},
          {"denom", Type::ComplexList, "2"},
          {"kind", Type::Enum, "J", {}, false, {"J", "Y", "I", "K"}},
          {"nu", Type::Real, "0"},
          {"x", Type::Real, "1"},
          {"n", Type::Int, "2", 0.0},
          {"rel_tol", Type::Real, "1e-12", 0.0, true}}},
        {"oscillator",
         {{"N", Type::Int, "1", 0.0},
          {"gamma", Type::Real, "0.5", 0.0},
          {"E", Type::Complex, "1"},
          {"c0", Type::Complex, "1"},
          {"c1", Type::Complex, "0"},
          {"theta", Type::Complex, "0.2"},  // N = 1 is singular at theta = 0
          {"n_max", Type::Int, "40", 2.0},
          {"x_values", Type::RealList, "0.25,0.5,1"},
          {"strict", Type::Bool, "false"}}},
        {"bethe",
         {{"n", Type::Int, "2", 1.0},
          {"N", Type::Int, "1", 0.0},
          {"tol", Type::Real, "1e-12", 0.0, true},
          {"a", Type::Complex, "1"},
          {"x_min", Type::Real, "-3"},
          {"x_max", Type::Real, "3"},
          {"points", Type::Int, "121", 2.0}}},
        {"flow",
         {{"variant", Type::Enum, "n-power", {}, false,
           {"tau-recursion", "one-loop-v1", "one-loop-v2", "n-power", "lr", "cf-rg"}},
          {"N", Type::Int, "1", 1.0},
          {"nu", Type::Real, "0.3"},
          {"gamma0", Type::Complex, "0.5"},
          {"ginv0", Type::Complex, "1"},
          {"contour_angle", Type::Real, "0"},
          {"steps", Type::Int, "100", 1.0},
          {"s_max", Type::Real, "1", 0.0, true},
          {"C", Type::Real, "0.5"},
          {"gamma_min", Type::Real, "0.1", 0.0, true},
          {"gamma_max", Type::Real, "1", 0.0, true},
          {"complex_mode", Type::Bool, "false"},
          {"depth", Type::Int, "1", 0.0},
          {"g0", Type::ComplexList, "1,1,1"},
          {"tau", Type::RealList, "0,0.5,1"}}},
        {"cycle",
         {{"input", Type::Path, ""},
          {"x_col", Type::Enum, "re_ginv"},
          {"y_col", Type::Enum, "im_ginv"},
          {"tol", Type::Real, "0.001", 0.0, true},
          {"svg", Type::Path, ""}}},
        {"phase",
         {{"N_values", Type::RealList, "1,1.5,2,2.5,3"},
          {"gamma", Type::Real, "0.5", 0.0, true},
          {"E0", Type::Real, "1", 0.0, true},
          {"k", Type::Complex, "1"},
          {"nu", Type::Real, "0.5"},
          {"n_max", Type::Int, "256", 1.0},
          {"beta_T", Type::Real, "1", 0.0, true}}},
        {"wetterich",
         {{"mode", Type::Enum, "real_osc", {}, false,
           {"real_osc", "perturbed", "complex_osc", "u_n1", "u_n2", "u_omega0_split", "u_n_infinity"}},
          {"omega", Type::Real, "1", 0.0, true},
          {"gamma", Type::Real, "0", 0.0},
          {"delta", Type::Real, "0", 0.0},
          {"Lambda", Type::Real, "1000000", 0.0},
          {"N", Type::Int, "1", 1.0},
          {"Lambda_values", Type::RealList, ""}}},
        {"render_svg",
         {{"input", Type::Path, ""},
          {"overlay", Type::PathList, ""},
          {"x_col", Type::Enum, "re_ginv"},
          {"y_col", Type::Enum, "im_ginv"}}},
    };
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::optional<double> to_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

std::optional<cplx> to_complex(std::string s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.back() != 'i' && s.back() != 'j') {
        const auto v = to_double(s);
        if (!v) return std::nullopt;
        return cplx(*v, 0.0);
    }
    const std::string body = s.substr(0, s.size() - 1);
    std::size_t split = std::string::npos;
    for (std::size_t p = body.size(); p-- > 1;)
        if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
            split = p;
            break;
        }
    auto imag_part = [](const std::string& t) -> std::optional<double> {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return to_double(t);
    };
    if (split == std::string::npos) {
        const auto im = imag_part(body);
        if (!im) return std::nullopt;
        return cplx(0.0, *im);
    }
    const auto re = to_double(body.substr(0, split));
    const auto im = imag_part(body.substr(split));
    if (!re || !im) return std::nullopt;
    return cplx(*re, *im);
}

std::string fmt_complex(cplx z) {
    if (z.imag() == 0.0) return fmt_real(z.real());
    const std::string im = fmt_real(std::fabs(z.imag()));
    return fmt_real(z.real()) + (std::signbit(z.imag()) ? "-" : "+") + im + "i";
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    throw ValidationError("key '" + key + "': " + why);
}

void check_bound(const KeySpec& k, double v) {
    if (!std::isfinite(v)) bad(k.name, "must be finite");
    if (k.lo) {
        if (k.strict ? !(v > *k.lo) : !(v >= *k.lo))
            bad(k.name, std::string("must be ") + (k.strict ? "> " : ">= ") + fmt_real(*k.lo));
    }
}

std::string canonical_value(const KeySpec& k, const std::string& raw_in) {
    const std::string raw = trim(raw_in);
    switch (k.type) {
        case Type::Int: {
            const auto v = to_double(raw);
            if (!v || *v != std::floor(*v) || std::fabs(*v) > 1e15) bad(k.name, "expected an integer, got '" + raw + "'");
            check_bound(k, *v);
            return std::to_string(static_cast<long long>(*v));
        }
        case Type::Real: {
            const auto v = to_double(raw);
            if (!v) bad(k.name, "expected a real number, got '" + raw + "'");
            check_bound(k, *v);
            return fmt_real(*v);
        }
        case Type::Complex: {
            const auto v = to_complex(raw);
            if (!v) bad(k.name, "expected a complex number (a, a+bi), got '" + raw + "'");
            if (!std::isfinite(v->real()) || !std::isfinite(v->imag())) bad(k.name, "must be finite");
            return fmt_complex(*v);
        }
        case Type::Bool: {
            if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return "true";
            if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return "false";
            bad(k.name, "expected true or false, got '" + raw + "'");
        }
        case Type::Enum: {
            if (k.choices.empty()) {
                if (raw.empty()) bad(k.name, "must not be empty");
                return raw;
            }
            for (const auto& c : k.choices)
                if (c == raw) return raw;
            std::string all;
            for (const auto& c : k.choices) all += (all.empty() ? "" : "|") + c;
            bad(k.name, "expected one of " + all + ", got '" + raw + "'");
        }
        case Type::RealList: {
            std::string out;
            for (const auto& item : split_list(raw)) {
                const auto v = to_double(item);
                if (!v) bad(k.name, "bad list element '" + item + "'");
                check_bound(k, *v);
                out += (out.empty() ? "" : ",") + fmt_real(*v);
            }
            return out;
        }
        case Type::ComplexList: {
            std::string out;
            for (const auto& item : split_list(raw)) {
                const auto v = to_complex(item);
                if (!v || !std::isfinite(v->real()) || !std::isfinite(v->imag()))
                    bad(k.name, "bad list element '" + item + "'");
                out += (out.empty() ? "" : ",") + fmt_complex(*v);
            }
            return out;
        }
        case Type::Path:
            return raw;
        case Type::PathList: {
            std::string out;
            for (const auto& item : split_list(raw)) out += (out.empty() ? "" : ",") + item;
            return out;
        }
    }
    bad(k.name, "unhandled type");
}

const std::string& param(const RunConfig& cfg, const std::string& key) {
    const auto it = cfg.params.find(key);
    if (it == cfg.params.end()) throw ValidationError("key '" + key + "' is not defined for " + cfg.subcommand);
    return it->second;
}

}  // namespace

double RunConfig::real(const std::string& key) const { return *to_double(param(*this, key)); }
long RunConfig::integer(const std::string& key) const { return std::stol(param(*this, key)); }
cplx RunConfig::complex(const std::string& key) const { return *to_complex(param(*this, key)); }
bool RunConfig::flag(const std::string& key) const { return param(*this, key) == "true"; }
const std::string& RunConfig::str(const std::string& key) const { return param(*this, key); }

std::vector<double> RunConfig::reals(const std::string& key) const {
    std::vector<double> v;
    for (const auto& s : split_list(param(*this, key))) v.push_back(*to_double(s));
    return v;
}

std::vector<cplx> RunConfig::complexes(const std::string& key) const {
    std::vector<cplx> v;
    for (const auto& s : split_list(param(*this, key))) v.push_back(*to_complex(s));
    return v;
}

std::vector<std::string> RunConfig::strings(const std::string& key) const { return split_list(param(*this, key)); }

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : schema()) v.push_back(k);
        return v;
    }();
    return names;
}

std::vector<std::string> schema_keys(const std::string& subcommand) {
    const auto it = schema().find(subcommand);
    if (it == schema().end()) throw ValidationError("unknown subcommand '" + subcommand + "'");
    std::vector<std::string> keys;
    for (const auto& k : it->second) keys.push_back(k.name);
    return keys;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty key");
        for (char ch : key)
            if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-'))
                throw ParseError("line " + std::to_string(lineno) + ": invalid character in key '" + key + "'");
        if (kv.count(key)) throw ParseError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("key 'config': cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

RunConfig make_config(const std::string& subcommand, const std::map<std::string, std::string>& file_values,
                      const std::map<std::string, std::string>& flag_values) {
    const auto it = schema().find(subcommand);
    if (it == schema().end()) throw ValidationError("unknown subcommand '" + subcommand + "'");
    std::map<std::string, std::string> raw;
    auto norm = [](std::string k) {
        for (auto& ch : k)
            if (ch == '-') ch = '_';
        return k;
    };
    for (const auto& [k, v] : file_values) raw[norm(k)] = v;
    for (const auto& [k, v] : flag_values) raw[norm(k)] = v;

    RunConfig cfg;
    cfg.subcommand = subcommand;
    if (auto s = raw.find("subcommand"); s != raw.end()) {
        if (trim(s->second) != subcommand)
            throw ValidationError("key 'subcommand': file says '" + s->second + "' but '" + subcommand + "' was requested");
        raw.erase(s);
    }
    if (auto o = raw.find("out"); o != raw.end()) {
        cfg.out_path = trim(o->second);
        raw.erase(o);
    }
    if (auto s = raw.find("seed"); s != raw.end()) {
        const auto v = to_double(trim(s->second));
        if (!v || *v != std::floor(*v) || std::fabs(*v) > 9e15) bad("seed", "expected an integer");
        cfg.seed = static_cast<std::int64_t>(*v);
        raw.erase(s);
    }
    for (const auto& [k, v] : raw) {
        bool known = false;
        for (const auto& spec : it->second) known = known || spec.name == k;
        if (!known) bad(k, "unknown key for subcommand '" + subcommand + "'");
    }
    for (const auto& spec : it->second) {
        const auto r = raw.find(spec.name);
        cfg.params[spec.name] = canonical_value(spec, r == raw.end() ? spec.def : r->second);
    }
    return cfg;
}

RunConfig parse_args(int argc, const char* const* argv) {
    if (argc < 2) throw ValidationError("usage: cflow <subcommand> [--config file] [--key value ...]");
    std::string sub = argv[1];
    int first = 2;
    std::map<std::string, std::string> file_values;
    if (sub.rfind("--", 0) == 0) {
        // no subcommand given: it must come from the config file
        sub.clear();
        first = 1;
    }

    CLI::App app{"cflow"};
    app.allow_windows_style_options(false);
    std::string config_path, out_path, seed;
    app.add_option("--config", config_path);
    app.add_option("--out", out_path);
    app.add_option("--seed", seed);
    std::map<std::string, std::string> flags;
    // Every schema key of every subcommand is registered, so unknown names fail in CLI11
    // and keys of the wrong subcommand fail in make_config with the key named.
    std::map<std::string, std::string> captured;
    std::set<std::string> names;
    for (const auto& s : subcommands())
        for (const auto& k : schema_keys(s)) names.insert(k);
    for (const auto& k : names) {
        std::string dashed = k;
        for (auto& ch : dashed)
            if (ch == '_') ch = '-';
        std::string spec = "--" + k;
        if (dashed != k) spec += ",--" + dashed;
        app.add_option(spec, captured[k]);
    }
    for (int i = first; i < argc; ++i) {
        const std::string a = argv[i];
        if (a.rfind("--", 0) != 0) continue;
        std::string key = a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2);
        for (auto& ch : key)
            if (ch == '-') ch = '_';
        if (!names.count(key) && key != "config" && key != "out" && key != "seed")
            throw ValidationError("key '" + key + "': unknown key" + (sub.empty() ? "" : " for subcommand " + sub));
    }
    std::vector<std::string> args;
    for (int i = argc - 1; i >= first; --i) args.emplace_back(argv[i]);
    try {
        app.parse(args);
    } catch (const CLI::ExtrasError& e) {
        throw ValidationError(std::string("unknown flag: ") + e.what());
    } catch (const CLI::ParseError& e) {
        throw ValidationError(std::string("bad command line: ") + e.what());
    }
    for (const auto& k : names)
        if (app.count("--" + k) > 0) flags[k] = captured[k];
    if (!out_path.empty() || app.count("--out") > 0) flags["out"] = out_path;
    if (app.count("--seed") > 0) flags["seed"] = seed;

    if (!config_path.empty()) file_values = parse_config_file(config_path);
    if (sub.empty()) {
        const auto it = file_values.find("subcommand");
        if (it == file_values.end()) throw ValidationError("key 'subcommand': not given on the command line or in the config");
        sub = trim(it->second);
    }
    return make_config(sub, file_values, flags);
}

std::string canonical_echo(const RunConfig& cfg) {
    std::ostringstream o;
    o << "subcommand = " << cfg.subcommand << "\n";
    if (!cfg.out_path.empty()) o << "out = " << cfg.out_path << "\n";
    o << "seed = " << cfg.seed << "\n";
    for (const auto& [k, v] : cfg.params) o << k << " = " << v << "\n";
    return o.str();
}

}  // namespace cflow::cli
