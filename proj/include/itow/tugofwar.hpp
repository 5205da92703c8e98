#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "itow/errors.hpp"
#include "itow/field.hpp"
#include "itow/geometry.hpp"

namespace itow {

/// Discrete game instance on a grid: step radius eps, running payoff h
/// (uniformly positive), terminal payoff g on the boundary layer.
///
/// h must have one strict sign on the grid. A negative h is folded into the
/// solver by the sign symmetry (negate h and g, solve, negate the result),
/// which swaps the players' roles through one shared code path; mixed signs
/// are rejected because uniqueness is not available there.
class TowProblem {
public:
    TowProblem(Domain domain, GridPtr grid, double eps, const ScalarField& h_field,
               const ScalarField& g_field)
        : domain_(std::move(domain)), grid_(std::move(grid)), eps_(eps) {
        if (!(eps_ >= grid_->spacing() - kBallTol))
            throw InvalidSpecError("TowProblem: eps must be >= grid spacing");
        const int n = grid_->size();
        h_node_.resize(n);
        g_node_.assign(n, 0.0);
        double hmin = std::numeric_limits<double>::infinity();
        double hmax = -hmin;
        for (int i = 0; i < n; ++i) {
            double hv = h_field.value(grid_->node(i));
            if (!std::isfinite(hv)) throw InvalidSpecError("TowProblem: h not finite at a node");
            h_node_[i] = hv;
            hmin = std::min(hmin, hv);
            hmax = std::max(hmax, hv);
            if (grid_->is_boundary(i)) {
                double gv = g_field.value(domain_.project_to_boundary(grid_->node(i)));
                if (!std::isfinite(gv)) throw InvalidSpecError("TowProblem: g not finite");
                g_node_[i] = gv;
            }
        }
        if (hmin > 0.0) {
            negated_ = false;
        } else if (hmax < 0.0) {
            negated_ = true;
            for (auto& v : h_node_) v = -v;
            for (auto& v : g_node_) v = -v;
            hmin = -hmax;
        } else {
            throw InvalidSpecError("TowProblem: h must have one strict sign on the grid");
        }
        h_min_ = hmin;
    }

    const Domain& domain() const { return domain_; }
    const Grid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    double eps() const { return eps_; }
    double h_min() const { return h_min_; }
    bool negated() const { return negated_; }

    /// Sign-normalized samples (h > 0 convention).
    double h_at(int id) const { return h_node_[id]; }
    double g_at(int id) const { return g_node_[id]; }

private:
    Domain domain_;
    GridPtr grid_;
    double eps_;
    std::vector<double> h_node_;
    std::vector<double> g_node_;
    double h_min_ = 0.0;
    bool negated_ = false;
};

/// One-step dynamic-programming value at an interior node:
///   (eps^2/4) h(node) + 1/2 (max over eps-ball of V + min over eps-ball of V)
inline double dpp_update(const GridFunction& v, int node, const TowProblem& prob,
                         const BallStencil& stencil) {
    double mx = -std::numeric_limits<double>::infinity();
    double mn = std::numeric_limits<double>::infinity();
    for (int j = stencil.row[node]; j < stencil.row[node + 1]; ++j) {
        double val = v.values[stencil.ids[j]];
        mx = std::max(mx, val);
        mn = std::min(mn, val);
    }
    double e = prob.eps();
    return 0.25 * e * e * prob.h_at(node) + 0.5 * (mx + mn);
}

inline double dpp_update(const GridFunction& v, int node, const TowProblem& prob) {
    BallStencil stencil(prob.grid(), prob.eps());
    return dpp_update(v, node, prob, stencil);
}

struct TowSolution {
    GridFunction values;
    int sweeps = 0;
    double final_residual = 0.0;
    double eps = 0.0;
};

/// Starting iterate: g on the boundary layer, boundary mean elsewhere.
inline GridFunction tow_initial_guess(const TowProblem& prob) {
    GridFunction v(prob.grid_ptr());
    double sum = 0.0;
    int nb = 0;
    const Grid& grid = prob.grid();
    for (int i = 0; i < grid.size(); ++i)
        if (grid.is_boundary(i)) {
            sum += prob.g_at(i);
            ++nb;
        }
    double mean = nb > 0 ? sum / nb : 0.0;
    for (int i = 0; i < grid.size(); ++i) v.values[i] = grid.is_boundary(i) ? prob.g_at(i) : mean;
    return v;
}

/// One Gauss-Seidel sweep in lexicographic node order; returns the sup-norm
/// change. Boundary nodes stay pinned.
inline double tow_sweep(GridFunction& v, const TowProblem& prob, const BallStencil& stencil) {
    const Grid& grid = prob.grid();
    double change = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        if (grid.is_boundary(i)) continue;
        double nv = dpp_update(v, i, prob, stencil);
        change = std::max(change, std::abs(nv - v.values[i]));
        v.values[i] = nv;
    }
    return change;
}

/// Gauss-Seidel iteration to the fixed point of the eps-step recursion.
/// Deterministic for a given problem (fixed sweep order, no parallel races).
inline TowSolution solve_tow(const TowProblem& prob, double tol, int max_sweeps) {
    if (!(tol > 0.0)) throw InvalidSpecError("solve_tow: tol must be > 0");
    BallStencil stencil(prob.grid(), prob.eps());
    GridFunction v = tow_initial_guess(prob);
    double change = std::numeric_limits<double>::infinity();
    int sweep = 0;
    while (sweep < max_sweeps) {
        change = tow_sweep(v, prob, stencil);
        ++sweep;
        if (change <= tol) break;
    }
    if (change > tol)
        throw NonConvergedError("solve_tow: residual " + std::to_string(change) + " after " +
                                    std::to_string(sweep) + " sweeps",
                                change, sweep);
    if (prob.negated())
        for (auto& x : v.values) x = -x;
    return {std::move(v), sweep, change, prob.eps()};
}

/// A-posteriori check: max over interior nodes of |V - dpp_update(V)|,
/// evaluated in the solver's sign-normalized convention.
inline double dpp_residual(const TowSolution& sol, const TowProblem& prob) {
    BallStencil stencil(prob.grid(), prob.eps());
    GridFunction v = sol.values;
    if (prob.negated())
        for (auto& x : v.values) x = -x;
    double r = 0.0;
    for (int i = 0; i < prob.grid().size(); ++i) {
        if (prob.grid().is_boundary(i)) continue;
        r = std::max(r, std::abs(v.values[i] - dpp_update(v, i, prob, stencil)));
    }
    return r;
}

}  // namespace itow
