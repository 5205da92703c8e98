#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "itow/config.hpp"
#include "itow/io.hpp"
#include "itow/isaacs.hpp"
#include "itow/tugofwar.hpp"

namespace itow {

namespace rundetail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string out_path(const ExperimentConfig& c, const std::string& name) {
    std::filesystem::create_directories(c.output.dir);
    return (std::filesystem::path(c.output.dir) / name).string();
}

/// Sup difference against a reference field over interior nodes. Boundary
/// nodes carry projected boundary data, not solution content.
inline double interior_sup_error(const GridFunction& v, const ScalarField& ref) {
    double e = 0.0;
    const Grid& g = *v.grid;
    for (int i = 0; i < g.size(); ++i) {
        if (g.is_boundary(i)) continue;
        e = std::max(e, std::abs(v.values[i] - ref.value(g.node(i))));
    }
    return e;
}

}  // namespace rundetail

struct SolveArtifacts {
    TowSolution solution;
    std::string csv_path;
    std::string json_path;
};

inline SolveArtifacts run_solve(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    Domain domain = domain_from_cfg(cfg.domain);
    if (cfg.solver.stencil < 1) throw InvalidSpecError("solver.stencil must be >= 1");
    double spacing = cfg.solver.eps / cfg.solver.stencil;
    GridPtr grid = build_grid(domain, spacing);
    FieldPtr h = field_from_cfg(cfg.h, domain);
    FieldPtr g = field_from_cfg(cfg.g, domain);
    TowProblem prob(domain, grid, cfg.solver.eps, *h, *g);
    TowSolution sol = solve_tow(prob, cfg.solver.tol, cfg.solver.max_sweeps);

    SolveArtifacts art{std::move(sol), rundetail::out_path(cfg, "solution.csv"),
                       rundetail::out_path(cfg, "run.json")};
    write_solution_csv(art.csv_path, art.solution.values);
    json rec{{"eps", art.solution.eps},
             {"sweeps", art.solution.sweeps},
             {"residual", art.solution.final_residual},
             {"wall_time_s", rundetail::seconds_since(t0)},
             {"config", config_echo(cfg)}};
    write_text_atomic(art.json_path, rec.dump(2) + "\n");
    return art;
}

inline std::string run_isaacs(const ExperimentConfig& cfg) {
    const IsaacsCfg& ic = cfg.isaacs;
    Vec p = cfgdetail::to_vec(ic.p, "isaacs.p");
    int m = p.dim();
    if (static_cast<int>(ic.S.size()) != m * m)
        throw InvalidSpecError("isaacs.S must be a row-major m*m list");
    SymMat S = SymMat::from_rows(m, ic.S.data());

    std::vector<std::vector<double>> rows;
    if (ic.n_max >= 1) {
        Diagnostics diag = isaacs_diagnostics(p, S, ic.n_max, ic.diag_tol);
        for (const auto& r : diag.rows)
            rows.push_back({static_cast<double>(r.n), r.lambda_plus, r.lambda_minus,
                            r.lambda_limit});
    } else {
        IsaacsQuery q(p, S, ic.k, ic.l);
        double lp = isaacs_bounded(q, Side::plus);
        double lm = isaacs_bounded(q, Side::minus);
        rows.push_back({0.0, lp, lm, isaacs_limit(p, S)});
    }
    std::string path = rundetail::out_path(cfg, "isaacs.csv");
    write_text_atomic(path,
                      table_to_csv({"n", "lambda_plus", "lambda_minus", "lambda_limit"}, rows));
    return path;
}

struct SimulateArtifacts {
    PayoffEstimate estimate;
    std::string json_path;
    std::string paths_csv;  // empty unless per-path output was requested
};

inline SimulateArtifacts run_simulate(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    Domain domain = domain_from_cfg(cfg.domain);
    SdgProblem prob{domain, field_from_cfg(cfg.h, domain), field_from_cfg(cfg.g, domain)};
    Strategy smax = strategy_from_cfg(cfg.simulate.strategy_max, cfg, domain);
    Strategy smin = strategy_from_cfg(cfg.simulate.strategy_min, cfg, domain);
    Vec x0 = cfgdetail::to_vec(cfg.simulate.x0, "simulate.x0");
    double t_max = cfg.simulate.t_max > 0.0 ? cfg.simulate.t_max : default_t_max(domain);

    std::vector<PathOutcome> outcomes;
    PayoffEstimate est =
        mc_value(prob, x0, smax, smin, cfg.simulate.n_paths, cfg.simulate.dt, cfg.simulate.gamma,
                 t_max, cfg.simulate.seed, cfg.simulate.per_path_csv ? &outcomes : nullptr);

    SimulateArtifacts art{est, rundetail::out_path(cfg, "estimate.json"), ""};
    json rec{{"mean", est.mean},
             {"std_error", est.std_error},
             {"exit_fraction", est.exit_fraction},
             {"mean_exit_time", est.mean_exit_time},
             {"mean_max_displacement_sq", est.mean_max_displacement_sq},
             {"n_paths", est.n_paths},
             {"seed", cfg.simulate.seed},
             {"reliable", est.reliable},
             {"wall_time_s", rundetail::seconds_since(t0)},
             {"config", config_echo(cfg)}};
    write_text_atomic(art.json_path, rec.dump(2) + "\n");

    if (cfg.simulate.per_path_csv) {
        std::ostringstream out;
        out << "path_id,exit_time,payoff,censored\n";
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            const auto& o = outcomes[i];
            out << i << ",";
            if (o.exited)
                out << format_value(o.exit_time) << "," << format_value(o.payoff) << ",0\n";
            else
                out << ",,1\n";
        }
        art.paths_csv = rundetail::out_path(cfg, "paths.csv");
        write_text_atomic(art.paths_csv, out.str());
    }
    return art;
}

inline std::string run_verify(const ExperimentConfig& cfg) {
    if (cfg.verify.solution_csv.empty())
        throw InvalidSpecError("verify.solution_csv is required for the verify subcommand");
    Domain domain = domain_from_cfg(cfg.domain);
    double spacing = cfg.solver.eps / cfg.solver.stencil;
    GridPtr grid = build_grid(domain, spacing);
    GridFunction sol = read_solution_csv(cfg.verify.solution_csv, grid);
    InterpolatedGridField u(sol);
    FieldPtr h = field_from_cfg(cfg.h, domain);
    // step wide enough to clear interpolation kinks, small enough to leave
    // interior room on thin domains
    double step = cfg.verify.step > 0.0
                      ? cfg.verify.step
                      : std::min(4.0 * spacing, domain.thinnest_extent() / 8.0);
    if (cfg.verify.step <= 0.0) u.set_fd_step(step);
    // keep the stencil plus interpolation cell inside the node set
    double margin = std::min(1.6 * step + 2.0 * spacing, 0.45 * domain.thinnest_extent());
    auto pts = sample_interior_points(domain, cfg.verify.sample_count, margin, 0x7e51f7ULL);
    ResidualStats stats = viscosity_residual(u, *h, domain, step, pts);
    json rec{{"max_residual", stats.max_abs},
             {"mean_abs_residual", stats.mean_abs},
             {"skipped", stats.skipped},
             {"evaluated", stats.evaluated},
             {"skipped_policy", cfg.verify.skipped_policy},
             {"step", step},
             {"config", config_echo(cfg)}};
    std::string path = rundetail::out_path(cfg, "residual.json");
    write_text_atomic(path, rec.dump(2) + "\n");
    return path;
}

inline std::string run_converge(const ExperimentConfig& cfg) {
    if (cfg.converge.eps_list.empty()) throw InvalidSpecError("converge.eps_list is empty");
    Domain domain = domain_from_cfg(cfg.domain);
    FieldPtr h = field_from_cfg(cfg.h, domain);
    FieldPtr g = field_from_cfg(cfg.g, domain);
    auto oracle = oracle_for(cfg);

    std::vector<double> eps_sorted = cfg.converge.eps_list;
    std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<double>());
    std::vector<TowSolution> sols;
    for (double eps : eps_sorted) {
        GridPtr grid = build_grid(domain, eps / cfg.solver.stencil);
        TowProblem prob(domain, grid, eps, *h, *g);
        sols.push_back(solve_tow(prob, cfg.solver.tol, cfg.solver.max_sweeps));
    }

    std::vector<std::vector<double>> rows;
    if (oracle) {
        for (std::size_t i = 0; i < sols.size(); ++i)
            rows.push_back({eps_sorted[i],
                            rundetail::interior_sup_error(sols[i].values, *oracle)});
    } else {
        // no closed form: compare against the finest level on shared nodes
        const GridFunction& fine = sols.back().values;
        for (std::size_t i = 0; i + 1 < sols.size(); ++i) {
            const Grid& g_i = *sols[i].values.grid;
            double e = 0.0;
            for (int n = 0; n < g_i.size(); ++n) {
                if (g_i.is_boundary(n)) continue;
                int id = fine.grid->nearest_node(g_i.node(n));
                if (id < 0 || fine.grid->is_boundary(id)) continue;
                e = std::max(e, std::abs(sols[i].values.values[n] - fine.values[id]));
            }
            rows.push_back({eps_sorted[i], e});
        }
    }
    std::string path = rundetail::out_path(cfg, "converge.csv");
    write_text_atomic(path, table_to_csv({"eps", "sup_error"}, rows));
    return path;
}

}  // namespace itow
