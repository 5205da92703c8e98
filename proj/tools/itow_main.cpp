// itow — inhomogeneous infinity-Laplace tooling.
//
// Subcommands: solve, isaacs, simulate, verify, converge. Each reads a JSON
// config (see README) and writes machine-readable artifacts; selected scalar
// leaves can be overridden by flags. Exit status: 0 success, 2 invalid
// config, 3 solver non-convergence.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "itow/runner.hpp"

namespace {

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ','))
        if (!cell.empty()) out.push_back(std::stod(cell));
    return out;
}

struct Overrides {
    std::optional<double> eps, tol, dt, gamma, t_max, step, k, l;
    std::optional<int> max_sweeps, n_max, sample_count, stencil;
    std::optional<long> n_paths;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir, side, p_list, s_list, solution_csv;
};

void apply(itow::ExperimentConfig& cfg, const Overrides& o) {
    if (o.eps) cfg.solver.eps = *o.eps;
    if (o.tol) cfg.solver.tol = *o.tol;
    if (o.max_sweeps) cfg.solver.max_sweeps = *o.max_sweeps;
    if (o.stencil) cfg.solver.stencil = *o.stencil;
    if (o.dt) cfg.simulate.dt = *o.dt;
    if (o.gamma) cfg.simulate.gamma = *o.gamma;
    if (o.t_max) cfg.simulate.t_max = *o.t_max;
    if (o.n_paths) cfg.simulate.n_paths = *o.n_paths;
    if (o.seed) cfg.simulate.seed = *o.seed;
    if (o.step) cfg.verify.step = *o.step;
    if (o.sample_count) cfg.verify.sample_count = *o.sample_count;
    if (o.solution_csv) cfg.verify.solution_csv = *o.solution_csv;
    if (o.k) cfg.isaacs.k = *o.k;
    if (o.l) cfg.isaacs.l = *o.l;
    if (o.n_max) cfg.isaacs.n_max = *o.n_max;
    if (o.side) cfg.isaacs.side = *o.side;
    if (o.p_list) cfg.isaacs.p = parse_list(*o.p_list);
    if (o.s_list) cfg.isaacs.S = parse_list(*o.s_list);
    if (o.out_dir) cfg.output.dir = *o.out_dir;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tug-of-war solver, Isaacs operator tools and game simulator"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "JSON config file");
        sub->add_option("--out", ov.out_dir, "output directory (overrides output.dir)");
    };

    CLI::App* solve = app.add_subcommand("solve", "value iteration on a grid");
    add_common(solve);
    solve->add_option("--eps", ov.eps, "step radius");
    solve->add_option("--stencil", ov.stencil, "eps / spacing (integer)");
    solve->add_option("--tol", ov.tol, "sweep convergence tolerance");
    solve->add_option("--max-sweeps", ov.max_sweeps, "sweep budget");

    CLI::App* isaacs = app.add_subcommand("isaacs", "bounded and limit operators");
    add_common(isaacs);
    isaacs->add_option("--p", ov.p_list, "gradient surrogate, comma list");
    isaacs->add_option("--S", ov.s_list, "Hessian surrogate, row-major comma list");
    isaacs->add_option("--k", ov.k, "maximizer drift bound");
    isaacs->add_option("--l", ov.l, "minimizer drift bound");
    isaacs->add_option("--side", ov.side, "plus|minus (single evaluation)");
    isaacs->add_option("--n-max", ov.n_max, "diagnostics table up to k_n = l_n = n_max");

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo game value");
    add_common(simulate);
    simulate->add_option("--dt", ov.dt, "Euler step");
    simulate->add_option("--gamma", ov.gamma, "state perturbation intensity");
    simulate->add_option("--n-paths", ov.n_paths, "number of paths");
    simulate->add_option("--seed", ov.seed, "master seed");
    simulate->add_option("--t-max", ov.t_max, "censoring horizon");

    CLI::App* verify = app.add_subcommand("verify", "pointwise PDE residual of a solution CSV");
    add_common(verify);
    verify->add_option("--step", ov.step, "finite-difference step");
    verify->add_option("--sample-count", ov.sample_count, "number of sample points");
    verify->add_option("--solution", ov.solution_csv, "solution CSV path");

    CLI::App* converge = app.add_subcommand("converge", "eps sweep against the oracle");
    add_common(converge);
    converge->add_option("--tol", ov.tol, "sweep convergence tolerance");

    CLI11_PARSE(app, argc, argv);

    try {
        itow::ExperimentConfig cfg;
        if (!config_path.empty()) cfg = itow::load_config(config_path);
        apply(cfg, ov);

        if (solve->parsed()) {
            auto art = itow::run_solve(cfg);
            std::cout << art.csv_path << "\n" << art.json_path << "\n";
        } else if (isaacs->parsed()) {
            std::cout << itow::run_isaacs(cfg) << "\n";
        } else if (simulate->parsed()) {
            auto art = itow::run_simulate(cfg);
            std::cout << art.json_path << "\n";
            if (!art.paths_csv.empty()) std::cout << art.paths_csv << "\n";
            if (!art.estimate.reliable)
                std::cerr << "warning: exit fraction " << art.estimate.exit_fraction
                          << " < 0.99, estimate flagged unreliable\n";
        } else if (verify->parsed()) {
            std::cout << itow::run_verify(cfg) << "\n";
        } else if (converge->parsed()) {
            std::cout << itow::run_converge(cfg) << "\n";
        }
        return 0;
    } catch (const itow::NonConvergedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const itow::InvalidSpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
