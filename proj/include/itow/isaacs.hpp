#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "itow/errors.hpp"
#include "itow/tolerances.hpp"
#include "itow/vec.hpp"

namespace itow {

/// One player's action: a unit direction and a nonnegative drift intensity.
struct ControlAtom {
    Vec a;
    double c = 0.0;
};

inline void validate_atom(const ControlAtom& atom, const char* who) {
    if (!is_unit(atom.a))
        throw std::domain_error(std::string(who) + ": direction must be unit length");
    if (!(atom.c >= 0.0)) throw std::domain_error(std::string(who) + ": intensity must be >= 0");
}

/// Game Hamiltonian integrand:
///   -1/2 (a-b)' S (a-b) - (c+d) (a+b).p
/// a, b unit directions; c, d >= 0 drift intensities.
inline double hamiltonian(const Vec& a, const Vec& b, double c, double d, const Vec& p,
                          const SymMat& S) {
    if (!is_unit(a) || !is_unit(b))
        throw std::domain_error("hamiltonian: directions must be unit length");
    if (!(c >= 0.0) || !(d >= 0.0))
        throw std::domain_error("hamiltonian: intensities must be >= 0");
    Vec diff = a - b;
    return -0.5 * S.quad(diff) - (c + d) * (a + b).dot(p);
}

/// Limit operator on D = D0 ∪ D1:
///   -2 p'Sp/|p|^2 when |p| > tol_grad, else -2 tr(S)/m when S ≈ λI.
inline double isaacs_limit(const Vec& p, const SymMat& S,
                           const DTolerances& tol = default_d_tolerances()) {
    double pn = p.norm();
    if (pn > tol.tol_grad) return -2.0 * S.quad(p) / (pn * pn);
    if (S.isotropy_gap() <= tol.tol_iso(S)) return -2.0 * S.trace() / S.dim();
    throw OutsideDomainError("isaacs_limit: (p,S) outside D0 ∪ D1");
}

/// Bounded-operator query: gradient surrogate p, Hessian surrogate S,
/// and the two players' drift bounds.
struct IsaacsQuery {
    IsaacsQuery(Vec p_, SymMat S_, double k_, double l_)
        : p(std::move(p_)), S(std::move(S_)), k(k_), l(l_) {
        if (p.dim() != S.dim()) throw InvalidSpecError("IsaacsQuery: p and S dimensions differ");
        if (!(k >= 0.0) || !(l >= 0.0) || !std::isfinite(k) || !std::isfinite(l))
            throw InvalidSpecError("IsaacsQuery: bounds must be finite and >= 0");
    }
    Vec p;
    SymMat S;
    double k;
    double l;
};

enum class Side { plus, minus };

/// Direction-search configuration. Directions are scanned globally on a
/// coarse set and refined locally; intensities are never gridded (the
/// Hamiltonian is affine in each, so scalar optima sit at 0 or the bound).
struct SearchParams {
    int angle_points = 720;    // m = 2: uniform angle grid
    int sphere_points = 2000;  // m = 3: Fibonacci lattice
    double refine_tol = 1e-6;  // target width of the refinement bracket
};

namespace detail {

struct DirOpt {
    Vec dir;
    double value;
    double residual;
};

template <class F>
DirOpt maximize_m1(F&& f) {
    Vec plus{1.0}, minus{-1.0};
    double fp = f(plus), fm = f(minus);
    return fp >= fm ? DirOpt{plus, fp, 0.0} : DirOpt{minus, fm, 0.0};
}

template <class F>
DirOpt maximize_m2(F&& f, const SearchParams& sp) {
    const double two_pi = 2.0 * std::numbers::pi;
    auto dir_at = [](double th) { return Vec{std::cos(th), std::sin(th)}; };
    int n = std::max(8, sp.angle_points);
    double best_th = 0.0, best_v = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double th = two_pi * i / n;
        double v = f(dir_at(th));
        if (v > best_v) {
            best_v = v;
            best_th = th;
        }
    }
    // golden-section refinement around the best grid angle
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = best_th - two_pi / n, hi = best_th + two_pi / n;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(dir_at(x1)), f2 = f(dir_at(x2));
    while (hi - lo > sp.refine_tol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(dir_at(x2));
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(dir_at(x1));
        }
    }
    double th = 0.5 * (lo + hi);
    double v = f(dir_at(th));
    if (best_v > v) {
        v = best_v;
        th = best_th;
    }
    return {dir_at(th), v, hi - lo};
}

template <class F>
DirOpt maximize_m3(F&& f, const SearchParams& sp) {
    // Fibonacci lattice scan, then compass refinement on the tangent plane.
    const double pi = std::numbers::pi;
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    int n = std::max(32, sp.sphere_points);
    Vec best(3);
    double best_v = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double z = 1.0 - 2.0 * (i + 0.5) / n;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double th = 2.0 * pi * i / golden;
        Vec d{r * std::cos(th), r * std::sin(th), z};
        double v = f(d);
        if (v > best_v) {
            best_v = v;
            best = d;
        }
    }
    // local frame at the incumbent
    auto tangent_pair = [](const Vec& u) {
        Vec t1 = std::abs(u[0]) < 0.9 ? Vec{1.0, 0.0, 0.0} : Vec{0.0, 1.0, 0.0};
        t1 = (t1 - u.dot(t1) * u).normalized();
        Vec t2{u[1] * t1[2] - u[2] * t1[1], u[2] * t1[0] - u[0] * t1[2],
               u[0] * t1[1] - u[1] * t1[0]};
        return std::pair<Vec, Vec>(t1, t2);
    };
    double step = 2.0 * pi / std::sqrt(static_cast<double>(n));
    while (step > sp.refine_tol) {
        auto [t1, t2] = tangent_pair(best);
        bool moved = false;
        for (const Vec& t : {t1, t2, -t1, -t2}) {
            Vec cand = (best + step * t).normalized();
            double v = f(cand);
            if (v > best_v) {
                best_v = v;
                best = cand;
                moved = true;
            }
        }
        if (!moved) step *= 0.5;
    }
    return {best, best_v, step};
}

template <class F>
DirOpt maximize_over_sphere(int m, F&& f, const SearchParams& sp) {
    switch (m) {
        case 1:
            return maximize_m1(f);
        case 2:
            return maximize_m2(f, sp);
        case 3:
            return maximize_m3(f, sp);
        default:
            throw InvalidSpecError("direction search supports dimensions 1..3");
    }
}

}  // namespace detail

struct IsaacsBoundedResult {
    double value;
    double residual;  // refinement bracket width of the outer search
};

/// Bounded Bellman-Isaacs operator.
///
/// side == plus :  max_{|b|=1, 0<=d<=l}  min_{|a|=1, 0<=c<=k}  H(a,b,c,d;p,S)
/// side == minus:  min_{|a|=1, 0<=c<=k}  max_{|b|=1, 0<=d<=l}  H(a,b,c,d;p,S)
///
/// Scalar intensities are resolved analytically at {0, bound}; both direction
/// layers use the global-scan-plus-refinement search.
inline IsaacsBoundedResult isaacs_bounded_full(const IsaacsQuery& q, Side side,
                                               const SearchParams& sp = {}) {
    const int m = q.p.dim();
    const Vec& p = q.p;
    const SymMat& S = q.S;
    const double k = q.k, l = q.l;

    if (side == Side::minus) {
        // inner: max over (b, d); d = l exactly when (a+b).p < 0
        auto inner_max = [&](const Vec& a, double c) {
            auto fb = [&](const Vec& b) {
                Vec diff = a - b;
                double beta = (a + b).dot(p);
                return -0.5 * S.quad(diff) - c * beta + l * std::max(0.0, -beta);
            };
            return detail::maximize_over_sphere(m, fb, sp).value;
        };
        auto outer = [&](const Vec& a) {
            return -std::min(inner_max(a, 0.0), inner_max(a, k));
        };
        auto r = detail::maximize_over_sphere(m, outer, sp);
        return {-r.value, r.residual};
    }

    // plus: inner min over (a, c); c = k exactly when (a+b).p > 0
    auto inner_min = [&](const Vec& b, double d) {
        auto fa = [&](const Vec& a) {
            Vec diff = a - b;
            double beta = (a + b).dot(p);
            return -(-0.5 * S.quad(diff) - d * beta - k * std::max(0.0, beta));
        };
        return -detail::maximize_over_sphere(m, fa, sp).value;
    };
    auto outer = [&](const Vec& b) { return std::max(inner_min(b, 0.0), inner_min(b, l)); };
    auto r = detail::maximize_over_sphere(m, outer, sp);
    return {r.value, r.residual};
}

inline double isaacs_bounded(const IsaacsQuery& q, Side side, const SearchParams& sp = {}) {
    return isaacs_bounded_full(q, side, sp).value;
}

struct DiagnosticsRow {
    int n;
    double lambda_plus;
    double lambda_minus;
    double lambda_limit;
    double gap_plus;
    double gap_minus;
};

struct Diagnostics {
    std::vector<DiagnosticsRow> rows;
    double diag_tol;
    bool converged;  // final row within diag_tol of the limit on both sides
};

/// Tabulates both bounded operators along the schedule k_n = l_n = n against
/// the limit operator. Propagates OutsideDomainError when (p,S) ∉ D.
inline Diagnostics isaacs_diagnostics(const Vec& p, const SymMat& S, int n_max,
                                      double diag_tol = 0.05, const SearchParams& sp = {},
                                      const DTolerances& tol = default_d_tolerances()) {
    if (n_max < 1) throw InvalidSpecError("isaacs_diagnostics: n_max must be >= 1");
    double limit = isaacs_limit(p, S, tol);
    Diagnostics d;
    d.diag_tol = diag_tol;
    d.rows.reserve(n_max);
    for (int n = 1; n <= n_max; ++n) {
        IsaacsQuery q(p, S, static_cast<double>(n), static_cast<double>(n));
        double lp = isaacs_bounded(q, Side::plus, sp);
        double lm = isaacs_bounded(q, Side::minus, sp);
        d.rows.push_back({n, lp, lm, limit, std::abs(lp - limit), std::abs(lm - limit)});
    }
    const auto& last = d.rows.back();
    d.converged = last.gap_plus <= diag_tol && last.gap_minus <= diag_tol;
    return d;
}

}  // namespace itow
