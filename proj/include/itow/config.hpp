#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "itow/errors.hpp"
#include "itow/field.hpp"
#include "itow/geometry.hpp"
#include "itow/io.hpp"
#include "itow/sdg.hpp"
#include "itow/verify.hpp"

namespace itow {

using json = nlohmann::json;

struct DomainCfg {
    std::string kind = "interval";
    double a = 0.0, b = 1.0;                       // interval
    std::vector<double> lo, hi;                    // box
    std::vector<double> center;                    // ball / annulus
    double r = 1.0;                                // ball
    double r_in = 1.0, r_out = 2.0;                // annulus
};

struct FieldCfg {
    std::string kind = "constant";  // constant | polynomial | radial | affine
    double value = 0.0;
    std::vector<double> coeffs;       // polynomial in x1
    double inner = 0.0, outer = 0.0;  // radial boundary table
    double a0 = 0.0;                  // affine
    std::vector<double> a;
};

struct SolverCfg {
    double eps = 1.0 / 64.0;
    int stencil = 1;  // eps = stencil * spacing
    double tol = 1e-10;
    int max_sweeps = 500000;
};

struct StrategyCfg {
    std::string kind = "near_optimal_max";
    std::vector<double> a;            // constant: direction
    double c = 0.0;                   // constant: intensity
    double bound = 16.0;              // near-optimal intensity bound
    std::string source = "oracle";    // near-optimal value field: oracle | csv
    std::string csv;                  // solution CSV when source == "csv"
    std::vector<double> anchor;       // exit_forcing
    double c0 = -1.0;                 // exit_forcing; <= 0 means shape default
};

struct SimulateCfg {
    std::vector<double> x0;
    double dt = 1e-4;
    double gamma = 0.0;
    long n_paths = 10000;
    std::uint64_t seed = 1;
    double t_max = -1.0;  // <= 0: 50 * diam^2 default
    StrategyCfg strategy_max;
    StrategyCfg strategy_min;
    bool per_path_csv = false;
};

struct IsaacsCfg {
    std::vector<double> p{1.0, 0.0};
    std::vector<double> S{1.0, 0.0, 0.0, 1.0};  // row-major
    double k = 10.0, l = 10.0;
    std::string side = "minus";
    int n_max = 0;  // >= 1 selects the diagnostics table
    double diag_tol = 0.05;
};

struct VerifyCfg {
    double step = -1.0;  // <= 0: 4 * grid spacing (suppresses interpolation kinks)
    int sample_count = 64;
    std::string solution_csv;
    std::string skipped_policy = "unverifiable";  // or "vacuous"
};

struct ConvergeCfg {
    std::vector<double> eps_list{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
};

struct OutputCfg {
    std::string dir = ".";
};

struct ExperimentConfig {
    DomainCfg domain;
    FieldCfg h;
    FieldCfg g;
    SolverCfg solver;
    SimulateCfg simulate;
    IsaacsCfg isaacs;
    VerifyCfg verify;
    ConvergeCfg converge;
    OutputCfg output;
};

namespace cfgdetail {

inline Vec to_vec(const std::vector<double>& v, const char* what) {
    if (v.empty() || v.size() > kMaxDim)
        throw InvalidSpecError(std::string(what) + ": need 1..3 components");
    Vec x(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<int>(i)] = v[i];
    return x;
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

inline int line_of_offset(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

}  // namespace cfgdetail

inline FieldCfg parse_field_cfg(const json& j) {
    FieldCfg f;
    cfgdetail::read(j, "kind", f.kind);
    cfgdetail::read(j, "value", f.value);
    cfgdetail::read(j, "coeffs", f.coeffs);
    cfgdetail::read(j, "inner", f.inner);
    cfgdetail::read(j, "outer", f.outer);
    cfgdetail::read(j, "a0", f.a0);
    cfgdetail::read(j, "a", f.a);
    return f;
}

inline StrategyCfg parse_strategy_cfg(const json& j) {
    StrategyCfg s;
    cfgdetail::read(j, "kind", s.kind);
    cfgdetail::read(j, "a", s.a);
    cfgdetail::read(j, "c", s.c);
    cfgdetail::read(j, "bound", s.bound);
    cfgdetail::read(j, "source", s.source);
    cfgdetail::read(j, "csv", s.csv);
    cfgdetail::read(j, "anchor", s.anchor);
    cfgdetail::read(j, "c0", s.c0);
    return s;
}

inline ExperimentConfig parse_config_json(const json& j) {
    ExperimentConfig c;
    if (j.contains("problem")) {
        const json& p = j.at("problem");
        if (p.contains("domain")) {
            const json& d = p.at("domain");
            cfgdetail::read(d, "kind", c.domain.kind);
            cfgdetail::read(d, "a", c.domain.a);
            cfgdetail::read(d, "b", c.domain.b);
            cfgdetail::read(d, "lo", c.domain.lo);
            cfgdetail::read(d, "hi", c.domain.hi);
            cfgdetail::read(d, "center", c.domain.center);
            cfgdetail::read(d, "r", c.domain.r);
            cfgdetail::read(d, "r_in", c.domain.r_in);
            cfgdetail::read(d, "r_out", c.domain.r_out);
        }
        if (p.contains("h")) c.h = parse_field_cfg(p.at("h"));
        if (p.contains("g")) c.g = parse_field_cfg(p.at("g"));
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        cfgdetail::read(s, "eps", c.solver.eps);
        cfgdetail::read(s, "stencil", c.solver.stencil);
        cfgdetail::read(s, "tol", c.solver.tol);
        cfgdetail::read(s, "max_sweeps", c.solver.max_sweeps);
    }
    if (j.contains("simulate")) {
        const json& s = j.at("simulate");
        cfgdetail::read(s, "x0", c.simulate.x0);
        cfgdetail::read(s, "dt", c.simulate.dt);
        cfgdetail::read(s, "gamma", c.simulate.gamma);
        cfgdetail::read(s, "n_paths", c.simulate.n_paths);
        cfgdetail::read(s, "seed", c.simulate.seed);
        cfgdetail::read(s, "t_max", c.simulate.t_max);
        cfgdetail::read(s, "per_path_csv", c.simulate.per_path_csv);
        if (s.contains("strategy_max")) c.simulate.strategy_max = parse_strategy_cfg(s.at("strategy_max"));
        if (s.contains("strategy_min")) {
            c.simulate.strategy_min = parse_strategy_cfg(s.at("strategy_min"));
        } else {
            c.simulate.strategy_min.kind = "near_optimal_min";
        }
    }
    if (j.contains("isaacs")) {
        const json& s = j.at("isaacs");
        cfgdetail::read(s, "p", c.isaacs.p);
        cfgdetail::read(s, "S", c.isaacs.S);
        cfgdetail::read(s, "k", c.isaacs.k);
        cfgdetail::read(s, "l", c.isaacs.l);
        cfgdetail::read(s, "side", c.isaacs.side);
        cfgdetail::read(s, "n_max", c.isaacs.n_max);
        cfgdetail::read(s, "diag_tol", c.isaacs.diag_tol);
    }
    if (j.contains("verify")) {
        const json& s = j.at("verify");
        cfgdetail::read(s, "step", c.verify.step);
        cfgdetail::read(s, "sample_count", c.verify.sample_count);
        cfgdetail::read(s, "solution_csv", c.verify.solution_csv);
        cfgdetail::read(s, "skipped_policy", c.verify.skipped_policy);
    }
    if (j.contains("converge")) cfgdetail::read(j.at("converge"), "eps_list", c.converge.eps_list);
    if (j.contains("output")) cfgdetail::read(j.at("output"), "dir", c.output.dir);
    return c;
}

/// Parses a config file; parse errors surface with a line number.
inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidSpecError("cannot open config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidSpecError(path + ":" + std::to_string(cfgdetail::line_of_offset(text, e.byte)) +
                               ": " + e.what());
    }
    try {
        return parse_config_json(j);
    } catch (const json::exception& e) {
        throw InvalidSpecError(path + ": " + e.what());
    }
}

inline Domain domain_from_cfg(const DomainCfg& d) {
    if (d.kind == "interval") return Domain::interval(d.a, d.b);
    if (d.kind == "box")
        return Domain::box(cfgdetail::to_vec(d.lo, "box.lo"), cfgdetail::to_vec(d.hi, "box.hi"));
    if (d.kind == "ball") return Domain::ball(cfgdetail::to_vec(d.center, "ball.center"), d.r);
    if (d.kind == "annulus") {
        Vec c = d.center.empty() ? Vec{0.0, 0.0} : cfgdetail::to_vec(d.center, "annulus.center");
        return Domain::annulus(d.r_in, d.r_out, c);
    }
    throw InvalidSpecError("domain.kind must be interval|box|ball|annulus");
}

inline FieldPtr field_from_cfg(const FieldCfg& f, const Domain& domain) {
    int m = domain.dim();
    if (f.kind == "constant") return constant_field(m, f.value);
    if (f.kind == "polynomial") return poly1_field(m, f.coeffs);
    if (f.kind == "radial") return radial_boundary_field(domain, f.inner, f.outer);
    if (f.kind == "affine") return affine_field(f.a0, cfgdetail::to_vec(f.a, "field.a"));
    throw InvalidSpecError("field.kind must be constant|polynomial|radial|affine");
}

/// Closed-form reference solution for the configured problem, where one
/// exists: interval with constant/polynomial h and constant/affine g, or an
/// annulus with constant h and radial (or constant) g.
inline std::optional<ExactSolution> oracle_for(const ExperimentConfig& c) {
    const DomainCfg& d = c.domain;
    if (d.kind == "interval") {
        std::vector<double> coeffs;
        if (c.h.kind == "constant") coeffs = {c.h.value};
        else if (c.h.kind == "polynomial") coeffs = c.h.coeffs;
        else return std::nullopt;
        double g0, g1;
        if (c.g.kind == "constant") {
            g0 = g1 = c.g.value;
        } else if (c.g.kind == "affine") {
            Vec a = cfgdetail::to_vec(c.g.a, "g.a");
            g0 = c.g.a0 + a[0] * d.a;
            g1 = c.g.a0 + a[0] * d.b;
        } else {
            return std::nullopt;
        }
        return ExactSolution::one_dim(d.a, d.b, coeffs, g0, g1);
    }
    if (d.kind == "annulus" && c.h.kind == "constant") {
        int m = d.center.empty() ? 2 : static_cast<int>(d.center.size());
        double gi, go;
        if (c.g.kind == "radial") {
            gi = c.g.inner;
            go = c.g.outer;
        } else if (c.g.kind == "constant") {
            gi = go = c.g.value;
        } else {
            return std::nullopt;
        }
        if (!d.center.empty())
            for (double x : d.center)
                if (x != 0.0) return std::nullopt;  // oracle is centered at the origin
        return ExactSolution::radial(d.r_in, d.r_out, m, c.h.value, gi, go);
    }
    return std::nullopt;
}

inline Strategy strategy_from_cfg(const StrategyCfg& s, const ExperimentConfig& cfg,
                                  const Domain& domain) {
    if (s.kind == "constant")
        return Strategy::constant({cfgdetail::to_vec(s.a, "strategy.a").normalized(), s.c});
    if (s.kind == "near_optimal_max" || s.kind == "near_optimal_min") {
        FieldPtr u;
        if (s.source == "oracle") {
            auto oracle = oracle_for(cfg);
            if (!oracle)
                throw InvalidSpecError("strategy source 'oracle': no closed-form solution for "
                                       "this problem; use source 'csv'");
            u = std::make_shared<ExactSolution>(*oracle);
        } else if (s.source == "csv") {
            GridPtr grid = build_grid(domain, cfg.solver.eps / cfg.solver.stencil);
            u = std::make_shared<InterpolatedGridField>(read_solution_csv(s.csv, grid));
        } else {
            throw InvalidSpecError("strategy.source must be oracle|csv");
        }
        return s.kind == "near_optimal_max" ? Strategy::near_optimal_max(u, s.bound)
                                            : Strategy::near_optimal_min(u, s.bound);
    }
    if (s.kind == "exit_forcing")
        return Strategy::exit_forcing(domain, cfgdetail::to_vec(s.anchor, "strategy.anchor"),
                                      s.c0);
    throw InvalidSpecError("strategy.kind must be constant|near_optimal_max|near_optimal_min|"
                           "exit_forcing");
}

/// Fully-resolved config echo (defaults included) for run records.
inline json config_echo(const ExperimentConfig& c) {
    json j;
    j["problem"]["domain"] = {{"kind", c.domain.kind}};
    json& d = j["problem"]["domain"];
    if (c.domain.kind == "interval") {
        d["a"] = c.domain.a;
        d["b"] = c.domain.b;
    } else if (c.domain.kind == "box") {
        d["lo"] = c.domain.lo;
        d["hi"] = c.domain.hi;
    } else if (c.domain.kind == "ball") {
        d["center"] = c.domain.center;
        d["r"] = c.domain.r;
    } else {
        d["center"] = c.domain.center.empty() ? std::vector<double>{0.0, 0.0} : c.domain.center;
        d["r_in"] = c.domain.r_in;
        d["r_out"] = c.domain.r_out;
    }
    auto field_json = [](const FieldCfg& f) {
        json fj{{"kind", f.kind}};
        if (f.kind == "constant") fj["value"] = f.value;
        if (f.kind == "polynomial") fj["coeffs"] = f.coeffs;
        if (f.kind == "radial") {
            fj["inner"] = f.inner;
            fj["outer"] = f.outer;
        }
        if (f.kind == "affine") {
            fj["a0"] = f.a0;
            fj["a"] = f.a;
        }
        return fj;
    };
    j["problem"]["h"] = field_json(c.h);
    j["problem"]["g"] = field_json(c.g);
    j["solver"] = {{"eps", c.solver.eps},
                   {"stencil", c.solver.stencil},
                   {"tol", c.solver.tol},
                   {"max_sweeps", c.solver.max_sweeps}};
    auto strat_json = [](const StrategyCfg& s) {
        json sj{{"kind", s.kind}};
        if (s.kind == "constant") {
            sj["a"] = s.a;
            sj["c"] = s.c;
        } else if (s.kind == "exit_forcing") {
            sj["anchor"] = s.anchor;
            sj["c0"] = s.c0;
        } else {
            sj["source"] = s.source;
            sj["bound"] = s.bound;
            if (s.source == "csv") sj["csv"] = s.csv;
        }
        return sj;
    };
    j["simulate"] = {{"x0", c.simulate.x0},
                     {"dt", c.simulate.dt},
                     {"gamma", c.simulate.gamma},
                     {"n_paths", c.simulate.n_paths},
                     {"seed", c.simulate.seed},
                     {"t_max", c.simulate.t_max},
                     {"per_path_csv", c.simulate.per_path_csv},
                     {"strategy_max", strat_json(c.simulate.strategy_max)},
                     {"strategy_min", strat_json(c.simulate.strategy_min)}};
    j["isaacs"] = {{"p", c.isaacs.p},     {"S", c.isaacs.S},
                   {"k", c.isaacs.k},     {"l", c.isaacs.l},
                   {"side", c.isaacs.side}, {"n_max", c.isaacs.n_max},
                   {"diag_tol", c.isaacs.diag_tol}};
    j["verify"] = {{"step", c.verify.step},
                   {"sample_count", c.verify.sample_count},
                   {"solution_csv", c.verify.solution_csv},
                   {"skipped_policy", c.verify.skipped_policy}};
    j["converge"] = {{"eps_list", c.converge.eps_list}};
    j["output"] = {{"dir", c.output.dir}};
    return j;
}

}  // namespace itow
