#pragma once

#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "itow/errors.hpp"
#include "itow/field.hpp"
#include "itow/geometry.hpp"
#include "itow/isaacs.hpp"
#include "itow/rng.hpp"
#include "itow/verify.hpp"

namespace itow {

/// Both players' actions at one instant.
struct ControlPair {
    ControlAtom maximizer;
    ControlAtom minimizer;
};

/// Continuous game instance: the domain, running payoff h, boundary payoff g.
struct SdgProblem {
    Domain domain;
    FieldPtr h;
    FieldPtr g;
};

/// Normalized-gradient / tangential-curvature feedback pair of a value field:
///   p = Du/|Du|,  q = (D^2u Du - Δ∞u Du) / |Du|^2.
/// q is orthogonal to Du by construction.
struct FeedbackPair {
    Vec p;
    Vec q;
};

inline FeedbackPair near_optimal_feedback(const ScalarField& u, const Vec& x,
                                          double tol_grad = 1e-8) {
    Vec du = u.gradient(x);
    double n = du.norm();
    if (!(n > tol_grad))
        throw DegenerateGradientError("near_optimal_feedback: |Du| below tolerance");
    SymMat h = u.hessian(x);
    Vec hdu = h.apply(du);
    double lam = du.dot(hdu) / (n * n);
    Vec q = (1.0 / (n * n)) * (hdu - lam * du);
    return {du * (1.0 / n), q};
}

/// Validity radius of the exit-forcing construction for a shape.
inline double exit_forcing_rho1(const Domain& domain) {
    return std::min(0.125, 0.25 / (1.0 + domain.curvature_bound()));
}

/// Smallest admissible push intensity, 8*(2*curvature_bound + 1) + 1.
inline double exit_forcing_c0(const Domain& domain) {
    return 8.0 * (2.0 * domain.curvature_bound() + 1.0) + 1.0;
}

/// Boundary-seeking control: direction -Dψ/|Dψ| for ψ(x) = level(x) +
/// |x - anchor|^2, at intensity c0. Defined where |Dψ| >= 1/2.
inline ControlAtom exit_forcing_control(const Vec& x, const Vec& anchor, const Domain& domain,
                                        double c0) {
    if (!(c0 >= exit_forcing_c0(domain)))
        throw InvalidSpecError("exit_forcing_control: c0 below the admissible intensity");
    Vec dpsi = domain.grad_level(x) + 2.0 * (x - anchor);
    double n = dpsi.norm();
    if (n < 0.5)
        throw OutsideValidityError("exit_forcing_control: |Dψ| < 1/2, outside the construction");
    return {dpsi * (-1.0 / n), c0};
}

/// Per-path mutable strategy memory (degenerate-gradient fallback direction).
struct StrategyState {
    Vec last_dir;
    bool has_last = false;
};

/// State-feedback strategy: (t, x) -> control atom, intensity capped by bound.
class Strategy {
public:
    using EvalFn = std::function<ControlAtom(double, const Vec&, StrategyState&)>;

    Strategy(EvalFn fn, double bound) : fn_(std::move(fn)), bound_(bound) {
        if (!(bound_ >= 0.0)) throw InvalidSpecError("Strategy: bound must be >= 0");
    }

    double bound() const { return bound_; }

    ControlAtom operator()(double t, const Vec& x, StrategyState& st) const {
        ControlAtom atom = fn_(t, x, st);
        atom.c = std::min(atom.c, bound_);
        validate_atom(atom, "Strategy");
        st.last_dir = atom.a;
        st.has_last = true;
        return atom;
    }

    static Strategy constant(const ControlAtom& atom) {
        validate_atom(atom, "Strategy::constant");
        return Strategy([atom](double, const Vec&, StrategyState&) { return atom; }, atom.c);
    }

    static Strategy custom(EvalFn fn, double bound) { return Strategy(std::move(fn), bound); }

    /// Maximizing near-optimal play from a value field: direction along
    /// p + q/(2*bound), intensity at the bound. Where the gradient degenerates
    /// (or the field cannot be differenced) the previous direction is reused
    /// at zero intensity, an axis direction at the first step.
    static Strategy near_optimal_max(FieldPtr u, double bound, double tol_grad = 1e-8) {
        return near_optimal(std::move(u), bound, tol_grad, +1.0);
    }

    /// Minimizing counterpart: direction along -p + q/(2*bound).
    static Strategy near_optimal_min(FieldPtr u, double bound, double tol_grad = 1e-8) {
        return near_optimal(std::move(u), bound, tol_grad, -1.0);
    }

    /// Exit-forcing feedback anchored at a point near the boundary. Outside
    /// the construction's validity region the push continues along -Dlevel.
    static Strategy exit_forcing(const Domain& domain, const Vec& anchor, double c0 = -1.0) {
        double intensity = c0 > 0.0 ? c0 : exit_forcing_c0(domain);
        Domain dom = domain;
        return Strategy(
            [dom, anchor, intensity](double, const Vec& x, StrategyState&) -> ControlAtom {
                try {
                    return exit_forcing_control(x, anchor, dom, intensity);
                } catch (const OutsideValidityError&) {
                    return {-dom.grad_level(x).normalized(), intensity};
                }
            },
            intensity);
    }

private:
    static Strategy near_optimal(FieldPtr u, double bound, double tol_grad, double sign) {
        if (!(bound > 0.0)) throw InvalidSpecError("near_optimal: bound must be > 0");
        return Strategy(
            [u, bound, tol_grad, sign](double, const Vec& x, StrategyState& st) -> ControlAtom {
                try {
                    FeedbackPair fb = near_optimal_feedback(*u, x, tol_grad);
                    Vec dir = (sign * fb.p + (0.5 / bound) * fb.q).normalized();
                    return {dir, bound};
                } catch (const DegenerateGradientError&) {
                } catch (const NearBoundaryError&) {
                }
                // Degenerate gradient: keep the previous direction at zero
                // intensity; at the first step take the axis direction, signed
                // per player so the two sides keep the diffusion switched on.
                Vec dir = st.has_last ? st.last_dir : sign * Vec::axis(x.dim(), 0);
                return {dir, 0.0};
            },
            bound);
    }

    EvalFn fn_;
    double bound_;
};

/// Simulated path. exit_time is +inf when the horizon censored the path.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    bool exited = false;
    double exit_time = std::numeric_limits<double>::infinity();
    Vec exit_point;
    double running_integral = 0.0;
    double max_displacement = 0.0;  // sup_t |X_t - x0|
    Vec start;
};

/// Lean per-path record used by the Monte Carlo estimator.
struct PathOutcome {
    bool exited = false;
    double exit_time = std::numeric_limits<double>::infinity();
    Vec exit_point;
    double running_integral = 0.0;
    double max_displacement = 0.0;
    double payoff = 0.0;  // running integral + g(exit point); valid when exited
};

namespace detail {

using PathSummary = PathOutcome;

/// Euler-Maruyama loop shared by the trajectory API and the Monte Carlo
/// estimator. Dynamics per step:
///   X' = X + (A-B) dW + gamma dWtilde + (C+D)(A+B) dt
/// The first boundary crossing is located by linear interpolation of the
/// level field inside the step; the running payoff uses the left endpoint.
inline PathSummary run_path(const SdgProblem& prob, const Vec& x0, const Strategy& smax,
                            const Strategy& smin, double dt, double gamma, double t_max,
                            CounterRng& rng, Trajectory* record) {
    const Domain& dom = prob.domain;
    const int m = dom.dim();
    if (dom.level(x0) < -kBallTol)
        throw std::domain_error("simulate_path: start point outside the closed domain");
    if (!(dt > 0.0) || !(t_max > 0.0) || !(gamma >= 0.0 && gamma < 1.0))
        throw InvalidSpecError("simulate_path: need dt > 0, t_max > 0, gamma in [0,1)");

    PathSummary out;
    if (record) {
        record->times.assign(1, 0.0);
        record->states.assign(1, x0);
        record->start = x0;
    }
    if (dom.level(x0) <= 1e-12) {  // already on the boundary
        out.exited = true;
        out.exit_time = 0.0;
        out.exit_point = x0;
        out.payoff = prob.g->value(x0);
        return out;
    }

    StrategyState st_max, st_min;
    Vec x = x0;
    double t = 0.0;
    double sqdt = std::sqrt(dt);
    while (t < t_max) {
        ControlAtom ymax = smax(t, x, st_max);
        ControlAtom zmin = smin(t, x, st_min);
        double dw = sqdt * rng.normal();
        Vec xn = x + dw * (ymax.a - zmin.a) +
                 (ymax.c + zmin.c) * dt * (ymax.a + zmin.a);
        if (gamma > 0.0) xn += gamma * rng.normal_vec(m, sqdt);

        double lev_n = dom.level(xn);
        if (lev_n <= 0.0) {
            double lev = dom.level(x);
            double theta = lev / (lev - lev_n);
            Vec hit = x + theta * (xn - x);
            out.exited = true;
            out.exit_time = t + theta * dt;
            out.exit_point = dom.project_to_boundary(hit);
            out.running_integral += prob.h->value(x) * theta * dt;
            out.max_displacement =
                std::max(out.max_displacement, (out.exit_point - x0).norm());
            if (record) {
                record->times.push_back(out.exit_time);
                record->states.push_back(out.exit_point);
            }
            break;
        }
        out.running_integral += prob.h->value(x) * dt;
        x = xn;
        t += dt;
        out.max_displacement = std::max(out.max_displacement, (x - x0).norm());
        if (record) {
            record->times.push_back(t);
            record->states.push_back(x);
        }
    }
    if (out.exited) out.payoff = out.running_integral + prob.g->value(out.exit_point);
    return out;
}

inline double tree_sum(const double* v, std::size_t n) {
    if (n == 0) return 0.0;
    if (n == 1) return v[0];
    std::size_t half = n / 2;
    return tree_sum(v, half) + tree_sum(v + half, n - half);
}

inline int worker_count(long n_items) {
    if (const char* env = std::getenv("ITOW_THREADS")) {
        int t = std::atoi(env);
        if (t >= 1) return static_cast<int>(std::min<long>(t, n_items));
    }
    unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::min<long>(hw == 0 ? 1 : hw, n_items));
}

}  // namespace detail

inline Trajectory simulate_path(const SdgProblem& prob, const Vec& x0, const Strategy& smax,
                                const Strategy& smin, double dt, double gamma, double t_max,
                                CounterRng& rng) {
    Trajectory traj;
    auto s = detail::run_path(prob, x0, smax, smin, dt, gamma, t_max, rng, &traj);
    traj.exited = s.exited;
    traj.exit_time = s.exit_time;
    traj.exit_point = s.exit_point;
    traj.running_integral = s.running_integral;
    traj.max_displacement = s.max_displacement;
    traj.start = x0;
    return traj;
}

/// Path payoff: running integral of h up to the exit plus g at the exit
/// point; empty for censored paths (never silently dropped — the estimator
/// reports the censoring fraction). When the trajectory carries recorded
/// states the integral is re-accumulated left-endpoint from them.
inline std::optional<double> payoff(const Trajectory& traj, const ScalarField& h,
                                    const ScalarField& g) {
    if (!traj.exited) return std::nullopt;
    double integral = traj.running_integral;
    if (traj.states.size() >= 2) {
        integral = 0.0;
        for (std::size_t i = 0; i + 1 < traj.states.size(); ++i)
            integral += h.value(traj.states[i]) * (traj.times[i + 1] - traj.times[i]);
    }
    return integral + g.value(traj.exit_point);
}

/// Monte Carlo value estimate at a fixed strategy pair.
struct PayoffEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
    double exit_fraction = 0.0;
    double mean_exit_time = 0.0;
    double mean_max_displacement_sq = 0.0;
    bool reliable = true;  // false when exit_fraction < 0.99
};

/// Runs n_paths independent paths with per-path streams keyed by
/// (seed, path index). The aggregation is a pairwise tree over a payoff
/// array indexed by path, so the result is bit-identical for any worker
/// count. Censored paths are excluded from the mean and flagged through
/// exit_fraction.
inline PayoffEstimate mc_value(const SdgProblem& prob, const Vec& x0, const Strategy& smax,
                               const Strategy& smin, long n_paths, double dt, double gamma,
                               double t_max, std::uint64_t seed,
                               std::vector<PathOutcome>* per_path = nullptr) {
    if (n_paths < 1) throw InvalidSpecError("mc_value: n_paths must be >= 1");
    std::vector<detail::PathSummary> paths(static_cast<std::size_t>(n_paths));

    auto run_range = [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i) {
            CounterRng rng(seed, static_cast<std::uint64_t>(i));
            paths[static_cast<std::size_t>(i)] =
                detail::run_path(prob, x0, smax, smin, dt, gamma, t_max, rng, nullptr);
        }
    };
    int workers = detail::worker_count(n_paths);
    if (workers <= 1) {
        run_range(0, n_paths);
    } else {
        std::vector<std::thread> pool;
        long chunk = (n_paths + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            long lo = w * chunk, hi = std::min<long>(n_paths, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    std::vector<double> payoffs, exit_times, disp2;
    payoffs.reserve(paths.size());
    for (const auto& p : paths)
        if (p.exited) {
            payoffs.push_back(p.payoff);
            exit_times.push_back(p.exit_time);
            disp2.push_back(p.max_displacement * p.max_displacement);
        }
    PayoffEstimate est;
    est.n_paths = n_paths;
    long n_exit = static_cast<long>(payoffs.size());
    est.exit_fraction = static_cast<double>(n_exit) / static_cast<double>(n_paths);
    est.reliable = est.exit_fraction >= 0.99;
    if (n_exit > 0) {
        est.mean = detail::tree_sum(payoffs.data(), payoffs.size()) / n_exit;
        est.mean_exit_time = detail::tree_sum(exit_times.data(), exit_times.size()) / n_exit;
        est.mean_max_displacement_sq = detail::tree_sum(disp2.data(), disp2.size()) / n_exit;
        if (n_exit > 1) {
            std::vector<double> sq(payoffs.size());
            for (std::size_t i = 0; i < payoffs.size(); ++i) {
                double d = payoffs[i] - est.mean;
                sq[i] = d * d;
            }
            double var = detail::tree_sum(sq.data(), sq.size()) / (n_exit - 1);
            est.std_error = std::sqrt(var / n_exit);
        }
    }
    if (per_path) *per_path = std::move(paths);
    return est;
}

/// Default censoring horizon, far beyond the oracle exit scales.
inline double default_t_max(const Domain& domain) {
    double d = domain.diameter();
    return 50.0 * d * d;
}

}  // namespace itow
