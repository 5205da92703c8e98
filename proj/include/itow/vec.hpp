#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace itow {

inline constexpr int kMaxDim = 3;

/// Fixed-capacity Euclidean vector for dimensions 1..3.
///
/// All state lives inline so hot loops (path stepping, direction search)
/// never allocate. The runtime dimension is part of the value.
class Vec {
public:
    Vec() : m_(0) {}
    explicit Vec(int m, double fill = 0.0) : m_(m) {
        check_dim(m);
        for (int i = 0; i < m; ++i) v_[i] = fill;
    }
    Vec(std::initializer_list<double> xs) : m_(static_cast<int>(xs.size())) {
        check_dim(m_);
        int i = 0;
        for (double x : xs) v_[i++] = x;
    }

    int dim() const { return m_; }
    double operator[](int i) const { return v_[i]; }
    double& operator[](int i) { return v_[i]; }

    double dot(const Vec& o) const {
        double s = 0.0;
        for (int i = 0; i < m_; ++i) s += v_[i] * o.v_[i];
        return s;
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < m_; ++i) v_[i] += o.v_[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < m_; ++i) v_[i] -= o.v_[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < m_; ++i) v_[i] *= s;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator*(Vec a, double s) { return a *= s; }
    friend Vec operator-(Vec a) {
        for (int i = 0; i < a.m_; ++i) a.v_[i] = -a.v_[i];
        return a;
    }
    friend bool operator==(const Vec& a, const Vec& b) {
        if (a.m_ != b.m_) return false;
        for (int i = 0; i < a.m_; ++i)
            if (a.v_[i] != b.v_[i]) return false;
        return true;
    }

    /// Unit vector in the same direction; throws on (near-)zero input.
    Vec normalized(double tol = 1e-300) const {
        double n = norm();
        if (!(n > tol)) throw std::domain_error("Vec::normalized: zero vector");
        Vec r = *this;
        return r *= 1.0 / n;
    }

    static Vec axis(int m, int i) {
        Vec e(m);
        e[i] = 1.0;
        return e;
    }

private:
    static void check_dim(int m) {
        if (m < 0 || m > kMaxDim)
            throw std::invalid_argument("Vec: dimension must be in [0," + std::to_string(kMaxDim) + "]");
    }
    std::array<double, kMaxDim> v_{};
    int m_;
};

/// Symmetric m-by-m matrix, m in 1..3, stored dense and symmetrized on write.
class SymMat {
public:
    SymMat() : m_(0) {}
    explicit SymMat(int m, double fill = 0.0) : m_(m) {
        if (m < 0 || m > kMaxDim) throw std::invalid_argument("SymMat: bad dimension");
        for (auto& x : a_) x = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) at(i, j) = (i == j) ? fill : 0.0;
    }

    static SymMat identity(int m, double scale = 1.0) { return SymMat(m, scale); }

    /// Builds from row-major entries, averaging (i,j) and (j,i).
    static SymMat from_rows(int m, const double* rows) {
        SymMat s(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                s.at(i, j) = 0.5 * (rows[i * m + j] + rows[j * m + i]);
        return s;
    }

    int dim() const { return m_; }
    double operator()(int i, int j) const { return a_[i * kMaxDim + j]; }
    void set(int i, int j, double v) {
        at(i, j) = v;
        at(j, i) = v;
    }

    Vec apply(const Vec& x) const {
        Vec y(m_);
        for (int i = 0; i < m_; ++i) {
            double s = 0.0;
            for (int j = 0; j < m_; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }
    double quad(const Vec& x) const { return x.dot(apply(x)); }
    double trace() const {
        double s = 0.0;
        for (int i = 0; i < m_; ++i) s += (*this)(i, i);
        return s;
    }
    double frobenius() const {
        double s = 0.0;
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < m_; ++j) s += (*this)(i, j) * (*this)(i, j);
        return std::sqrt(s);
    }
    /// Frobenius distance to the nearest multiple of the identity, (tr/m)*I.
    double isotropy_gap() const {
        double lam = trace() / m_;
        double s = 0.0;
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < m_; ++j) {
                double d = (*this)(i, j) - (i == j ? lam : 0.0);
                s += d * d;
            }
        return std::sqrt(s);
    }

    friend SymMat operator*(double s, SymMat a) {
        for (auto& x : a.a_) x *= s;
        return a;
    }
    friend SymMat operator+(SymMat a, const SymMat& b) {
        for (std::size_t i = 0; i < a.a_.size(); ++i) a.a_[i] += b.a_[i];
        return a;
    }

private:
    double& at(int i, int j) { return a_[i * kMaxDim + j]; }
    std::array<double, kMaxDim * kMaxDim> a_{};
    int m_;
};

inline bool is_unit(const Vec& a, double tol = 1e-12) { return std::abs(a.norm() - 1.0) <= tol; }

}  // namespace itow
