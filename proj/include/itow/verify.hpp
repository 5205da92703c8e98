#pragma once

#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "itow/errors.hpp"
#include "itow/field.hpp"
#include "itow/geometry.hpp"
#include "itow/rng.hpp"
#include "itow/tolerances.hpp"

namespace itow {

struct Derivatives {
    Vec grad;
    SymMat hess;
};

namespace detail {
inline void check_stencil_inside(const Domain& domain, const Vec& x, double step) {
    int m = x.dim();
    auto probe = [&](const Vec& y) {
        if (domain.level(y) < -kBallTol)
            throw NearBoundaryError("fd_derivatives: stencil leaves the closed domain");
    };
    for (int i = 0; i < m; ++i)
        for (double si : {-step, step}) {
            Vec y = x;
            y[i] += si;
            probe(y);
            for (int j = i + 1; j < m; ++j)
                for (double sj : {-step, step}) {
                    Vec z = y;
                    z[j] += sj;
                    probe(z);
                }
        }
}
}  // namespace detail

/// Central-difference gradient and Hessian (second order, Hessian symmetric
/// by construction). The domain-aware overload refuses stencils that leave Ḡ.
inline Derivatives fd_derivatives(const ScalarField& f, const Vec& x, double step) {
    if (!(step > 0.0)) throw InvalidSpecError("fd_derivatives: step must be > 0");
    return {ScalarField::fd_gradient(f, x, step), ScalarField::fd_hessian(f, x, step)};
}

inline Derivatives fd_derivatives(const ScalarField& f, const Vec& x, double step,
                                  const Domain& domain) {
    if (!(step > 0.0)) throw InvalidSpecError("fd_derivatives: step must be > 0");
    detail::check_stencil_inside(domain, x, step);
    return fd_derivatives(f, x, step);
}

/// Second derivative in the gradient direction, grad' H grad / |grad|^2,
/// extended to tr(H)/m where the gradient vanishes and H ≈ λI. Equals
/// -isaacs_limit/2 on the shared domain D.
inline double infinity_laplacian(const Vec& grad, const SymMat& hess,
                                 const DTolerances& tol = default_d_tolerances()) {
    double gn = grad.norm();
    if (gn > tol.tol_grad) return hess.quad(grad) / (gn * gn);
    if (hess.isotropy_gap() <= tol.tol_iso(hess)) return hess.trace() / hess.dim();
    throw OutsideDomainError("infinity_laplacian: (grad, hess) outside D0 ∪ D1");
}

struct ResidualStats {
    double max_abs = 0.0;
    double mean_abs = 0.0;
    int evaluated = 0;
    int skipped = 0;
};

/// Pointwise residual of -2 Δ∞ u = h over the sample set, via central
/// differences of u. Points where the stencil leaves the domain or the
/// derivative pair falls outside D are skipped and counted, not fatal.
inline ResidualStats viscosity_residual(const ScalarField& u, const ScalarField& h,
                                        const Domain& domain, double step,
                                        const std::vector<Vec>& sample_points,
                                        const DTolerances& tol = default_d_tolerances()) {
    ResidualStats stats;
    double sum = 0.0;
    for (const Vec& x : sample_points) {
        try {
            Derivatives d = fd_derivatives(u, x, step, domain);
            double lam = infinity_laplacian(d.grad, d.hess, tol);
            double r = std::abs(-2.0 * lam - h.value(x));
            stats.max_abs = std::max(stats.max_abs, r);
            sum += r;
            ++stats.evaluated;
        } catch (const NearBoundaryError&) {
            ++stats.skipped;
        } catch (const OutsideDomainError&) {
            ++stats.skipped;
        }
    }
    stats.mean_abs = stats.evaluated > 0 ? sum / stats.evaluated : 0.0;
    return stats;
}

/// Uniform rejection sample of interior points with a level-margin.
inline std::vector<Vec> sample_interior_points(const Domain& domain, int count, double margin,
                                               std::uint64_t seed) {
    CounterRng rng(seed, 0);
    std::vector<Vec> pts;
    pts.reserve(count);
    Vec lo = domain.bbox_lo(), hi = domain.bbox_hi();
    int guard = 0;
    while (static_cast<int>(pts.size()) < count) {
        Vec x(domain.dim());
        for (int i = 0; i < domain.dim(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * rng.uniform();
        if (domain.level(x) > margin) pts.push_back(x);
        if (++guard > 1000 * count + 1000)
            throw InvalidSpecError("sample_interior_points: margin leaves no room");
    }
    return pts;
}

/// Closed-form solutions of -2 Δ∞ u = h used as test oracles.
///
/// one_dim: polynomial h > 0 on [a,b]; u solves u'' = -h/2 by exact
///          integration with boundary interpolation.
/// radial:  constant h on an annulus; u is the radial quadratic with
///          u'' = -h/2 and u' != 0 across the gap.
class ExactSolution : public ScalarField {
public:
    enum class Kind { one_dim, radial };

    static ExactSolution one_dim(double a, double b, std::vector<double> h_coeffs, double g0,
                                 double g1) {
        if (!(a < b)) throw InvalidSpecError("exact_solution: need a < b");
        ExactSolution s;
        s.kind_ = Kind::one_dim;
        s.domain_ = Domain::interval(a, b);
        s.a_ = a;
        s.b_ = b;
        s.h_coeffs_ = std::move(h_coeffs);
        // h > 0 on the closed interval (dense sample; endpoints included)
        for (int i = 0; i <= 2048; ++i) {
            double x = a + (b - a) * i / 2048.0;
            if (!(s.h1d(x) > 0.0))
                throw InvalidSpecError("exact_solution: h must be > 0 on the interval");
        }
        s.g0_ = g0;
        double h2b = s.h2(b);
        s.lin_ = (g1 - g0 + 0.5 * h2b) / (b - a);
        s.self_check();
        return s;
    }

    static ExactSolution radial(double r_in, double r_out, int m, double h_const, double g_inner,
                                double g_outer) {
        ExactSolution s;
        s.kind_ = Kind::radial;
        s.domain_ = Domain::annulus(r_in, r_out, Vec(m));
        s.hconst_ = h_const;
        if (!(h_const != 0.0)) throw InvalidSpecError("exact_solution: radial h must be nonzero");
        s.beta_ = (g_outer - g_inner + 0.25 * h_const * (r_out * r_out - r_in * r_in)) /
                  (r_out - r_in);
        s.c0_ = g_inner + 0.25 * h_const * r_in * r_in - s.beta_ * r_in;
        double d_in = -0.5 * h_const * r_in + s.beta_;
        double d_out = -0.5 * h_const * r_out + s.beta_;
        if (!(d_in * d_out > 0.0))
            throw InvalidSpecError("exact_solution: radial gradient vanishes inside the annulus");
        s.self_check();
        return s;
    }

    Kind kind() const { return kind_; }
    const Domain& domain() const { return domain_; }

    int dim() const override { return domain_.dim(); }

    double value(const Vec& x) const override {
        if (kind_ == Kind::one_dim) return -0.5 * h2(x[0]) + g0_ + lin_ * (x[0] - a_);
        double r = radius(x);
        return -0.25 * hconst_ * r * r + beta_ * r + c0_;
    }

    Vec gradient(const Vec& x) const override {
        if (kind_ == Kind::one_dim) return Vec{du1d(x[0])};
        double r = radius(x);
        return radial_deriv(r) * unit_radial(x);
    }

    SymMat hessian(const Vec& x) const override {
        int m = dim();
        if (kind_ == Kind::one_dim) {
            SymMat h(1);
            h.set(0, 0, -0.5 * h1d(x[0]));
            return h;
        }
        double r = radius(x);
        Vec u = unit_radial(x);
        double urr = -0.5 * hconst_;
        double ur_over_r = radial_deriv(r) / r;
        SymMat h(m);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                double proj = u[i] * u[j];
                double id = (i == j) ? 1.0 : 0.0;
                h.set(i, j, urr * proj + ur_over_r * (id - proj));
            }
        return h;
    }

    /// Running payoff matching this solution, as a field.
    FieldPtr h_field() const {
        if (kind_ == Kind::one_dim) {
            auto coeffs = h_coeffs_;
            return poly1_field(1, coeffs);
        }
        return constant_field(dim(), hconst_);
    }

private:
    double h1d(double x) const {
        double s = 0.0;
        for (std::size_t k = h_coeffs_.size(); k-- > 0;) s = s * x + h_coeffs_[k];
        return s;
    }
    // P(x) = ∫ h with P(a)=0 ; Q(x) = ∫ P with Q(a)=0 ; h2 = double integral
    double p1(double x) const {
        double s = 0.0, sa = 0.0;
        for (std::size_t k = 0; k < h_coeffs_.size(); ++k) {
            s += h_coeffs_[k] * std::pow(x, double(k + 1)) / (k + 1);
            sa += h_coeffs_[k] * std::pow(a_, double(k + 1)) / (k + 1);
        }
        return s - sa;
    }
    double h2(double x) const {
        double s = 0.0, sa = 0.0, pa = 0.0;
        for (std::size_t k = 0; k < h_coeffs_.size(); ++k) {
            double c = h_coeffs_[k] / (k + 1);
            s += c * std::pow(x, double(k + 2)) / (k + 2);
            sa += c * std::pow(a_, double(k + 2)) / (k + 2);
            pa += h_coeffs_[k] * std::pow(a_, double(k + 1)) / (k + 1);
        }
        return (s - sa) - pa * (x - a_);
    }
    double du1d(double x) const { return -0.5 * p1(x) + lin_; }

    double radius(const Vec& x) const { return (x - domain_.center()).norm(); }
    Vec unit_radial(const Vec& x) const { return (x - domain_.center()).normalized(); }
    double radial_deriv(double r) const { return -0.5 * hconst_ * r + beta_; }

    void self_check() const {
        auto pts = sample_interior_points(domain_, 64, 0.02 * domain_.thinnest_extent(),
                                          0x5eedf00dULL);
        double h_here = 0.0;
        for (const Vec& x : pts) {
            double lam = infinity_laplacian(gradient(x), hessian(x));
            h_here = (kind_ == Kind::one_dim) ? h1d(x[0]) : hconst_;
            if (std::abs(-2.0 * lam - h_here) > 1e-10)
                throw InvalidSpecError("exact_solution: construction self-check failed");
        }
    }

    Kind kind_ = Kind::one_dim;
    Domain domain_ = Domain::interval(0.0, 1.0);
    // one_dim state
    double a_ = 0.0, b_ = 1.0, g0_ = 0.0, lin_ = 0.0;
    std::vector<double> h_coeffs_;
    // radial state
    double hconst_ = 0.0, beta_ = 0.0, c0_ = 0.0;
};

}  // namespace itow
