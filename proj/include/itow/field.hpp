#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "itow/errors.hpp"
#include "itow/geometry.hpp"
#include "itow/vec.hpp"

namespace itow {

/// Scalar field on (a superset of) the closed domain. Derivatives default to
/// second-order central differences; analytic implementations override them.
class ScalarField {
public:
    virtual ~ScalarField() = default;
    virtual int dim() const = 0;
    virtual double value(const Vec& x) const = 0;

    virtual Vec gradient(const Vec& x) const { return fd_gradient(*this, x, fd_step_); }
    virtual SymMat hessian(const Vec& x) const { return fd_hessian(*this, x, fd_step_); }

    /// Central-difference gradient, error O(step^2).
    static Vec fd_gradient(const ScalarField& f, const Vec& x, double step) {
        int m = x.dim();
        Vec g(m);
        for (int i = 0; i < m; ++i) {
            Vec xp = x, xm = x;
            xp[i] += step;
            xm[i] -= step;
            g[i] = (f.value(xp) - f.value(xm)) / (2.0 * step);
        }
        return g;
    }

    /// Central-difference Hessian, symmetric by construction, error O(step^2).
    static SymMat fd_hessian(const ScalarField& f, const Vec& x, double step) {
        int m = x.dim();
        SymMat h(m);
        double f0 = f.value(x);
        for (int i = 0; i < m; ++i) {
            Vec xp = x, xm = x;
            xp[i] += step;
            xm[i] -= step;
            h.set(i, i, (f.value(xp) - 2.0 * f0 + f.value(xm)) / (step * step));
        }
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                Vec xpp = x, xpm = x, xmp = x, xmm = x;
                xpp[i] += step; xpp[j] += step;
                xpm[i] += step; xpm[j] -= step;
                xmp[i] -= step; xmp[j] += step;
                xmm[i] -= step; xmm[j] -= step;
                h.set(i, j, (f.value(xpp) - f.value(xpm) - f.value(xmp) + f.value(xmm)) /
                                (4.0 * step * step));
            }
        return h;
    }

    void set_fd_step(double s) { fd_step_ = s; }
    double fd_step() const { return fd_step_; }

private:
    double fd_step_ = 1e-5;
};

using FieldPtr = std::shared_ptr<const ScalarField>;

/// Field backed by callables; analytic derivatives are optional.
class AnalyticField : public ScalarField {
public:
    using ValueFn = std::function<double(const Vec&)>;
    using GradFn = std::function<Vec(const Vec&)>;
    using HessFn = std::function<SymMat(const Vec&)>;

    AnalyticField(int m, ValueFn v) : m_(m), value_(std::move(v)) {}
    AnalyticField(int m, ValueFn v, GradFn g, HessFn h)
        : m_(m), value_(std::move(v)), grad_(std::move(g)), hess_(std::move(h)) {}

    int dim() const override { return m_; }
    double value(const Vec& x) const override { return value_(x); }
    Vec gradient(const Vec& x) const override {
        return grad_ ? grad_(x) : ScalarField::gradient(x);
    }
    SymMat hessian(const Vec& x) const override {
        return hess_ ? hess_(x) : ScalarField::hessian(x);
    }

private:
    int m_;
    ValueFn value_;
    GradFn grad_;
    HessFn hess_;
};

inline FieldPtr constant_field(int m, double c) {
    return std::make_shared<AnalyticField>(
        m, [c](const Vec&) { return c; }, [m](const Vec&) { return Vec(m); },
        [m](const Vec&) { return SymMat(m); });
}

/// Polynomial in the first coordinate: sum_k coeff[k] * x1^k.
inline FieldPtr poly1_field(int m, std::vector<double> coeffs) {
    auto eval = [coeffs](double t) {
        double s = 0.0;
        for (std::size_t k = coeffs.size(); k-- > 0;) s = s * t + coeffs[k];
        return s;
    };
    return std::make_shared<AnalyticField>(m, [eval](const Vec& x) { return eval(x[0]); });
}

/// Affine field a0 + a . x (used for boundary data given in coordinates).
inline FieldPtr affine_field(double a0, const Vec& a) {
    int m = a.dim();
    return std::make_shared<AnalyticField>(
        m, [a0, a](const Vec& x) { return a0 + a.dot(x); }, [a](const Vec&) { return a; },
        [m](const Vec&) { return SymMat(m); });
}

/// Boundary data for radially symmetric shapes: one value per wall.
/// Evaluation snaps to the nearer wall, so it is well defined on all of Ḡ.
inline FieldPtr radial_boundary_field(const Domain& domain, double g_inner, double g_outer) {
    if (domain.kind() != DomainKind::annulus && domain.kind() != DomainKind::ball)
        throw InvalidSpecError("radial boundary data requires a ball or annulus domain");
    Vec center = domain.center();
    double r_mid = domain.kind() == DomainKind::ball
                       ? 0.0  // every boundary point is the outer wall
                       : 0.5 * (domain.r_inner() + domain.r_outer());
    int m = domain.dim();
    return std::make_shared<AnalyticField>(m, [center, r_mid, g_inner, g_outer](const Vec& x) {
        return ((x - center).norm() >= r_mid) ? g_outer : g_inner;
    });
}

/// Multilinear interpolation of node values, with finite-difference
/// derivatives decoupled from the mesh (default step = 4 * spacing) to keep
/// the interpolation kinks out of the stencil. Throws NearBoundaryError where
/// an interpolation cell corner is missing.
class InterpolatedGridField : public ScalarField {
public:
    explicit InterpolatedGridField(GridFunction f) : f_(std::move(f)) {
        set_fd_step(4.0 * f_.grid->spacing());
    }

    int dim() const override { return f_.grid->dim(); }

    double value(const Vec& x) const override {
        const Grid& g = *f_.grid;
        int m = g.dim();
        double s = g.spacing();
        std::array<int, kMaxDim> base{};
        std::array<double, kMaxDim> w{};
        for (int i = 0; i < m; ++i) {
            double t = (x[i] - g.origin()[i]) / s;
            base[i] = static_cast<int>(std::floor(t));
            w[i] = t - base[i];
        }
        double acc = 0.0;
        int corners = 1 << m;
        for (int c = 0; c < corners; ++c) {
            std::array<int, kMaxDim> k = base;
            double weight = 1.0;
            for (int i = 0; i < m; ++i) {
                int bit = (c >> i) & 1;
                k[i] += bit;
                weight *= bit ? w[i] : (1.0 - w[i]);
            }
            if (weight == 0.0) continue;
            int id = g.node_at(k);
            if (id < 0) throw NearBoundaryError("interpolation cell leaves the grid");
            acc += weight * f_.values[id];
        }
        return acc;
    }

    const GridFunction& data() const { return f_; }

private:
    GridFunction f_;
};

}  // namespace itow
