#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "itow/errors.hpp"
#include "itow/vec.hpp"

namespace itow {

inline constexpr double kBallTol = 1e-12;  // inclusive closed-ball membership slack

enum class DomainKind { interval, box, ball, annulus };

/// Implicit bounded domain described by a distance-like level field:
/// level > 0 inside, level = 0 on the boundary, level < 0 outside, and
/// |level(x) - level(y)| <= |x - y| for the supported shapes.
class Domain {
public:
    DomainKind kind() const { return kind_; }
    int dim() const { return dim_; }

    double level(const Vec& x) const {
        switch (kind_) {
            case DomainKind::interval:
                return std::min(x[0] - lo_[0], hi_[0] - x[0]);
            case DomainKind::box: {
                double v = hi_[0] - x[0];
                for (int i = 0; i < dim_; ++i) {
                    v = std::min(v, x[i] - lo_[i]);
                    v = std::min(v, hi_[i] - x[i]);
                }
                return v;
            }
            case DomainKind::ball:
                return r_out_ - radius(x);
            case DomainKind::annulus: {
                double r = radius(x);
                return std::min(r - r_in_, r_out_ - r);
            }
        }
        return 0.0;
    }

    /// Gradient of the level field. At ridge points (equidistant faces) the
    /// lexicographically first face wins; at a ball center an axis direction
    /// is returned. Unit norm everywhere for the supported shapes.
    Vec grad_level(const Vec& x) const {
        switch (kind_) {
            case DomainKind::interval:
                return (x[0] - lo_[0] <= hi_[0] - x[0]) ? Vec{1.0} : Vec{-1.0};
            case DomainKind::box: {
                int best = 0;
                double sign = 1.0, bestv = x[0] - lo_[0];
                for (int i = 0; i < dim_; ++i) {
                    if (x[i] - lo_[i] < bestv) { bestv = x[i] - lo_[i]; best = i; sign = 1.0; }
                    if (hi_[i] - x[i] < bestv) { bestv = hi_[i] - x[i]; best = i; sign = -1.0; }
                }
                Vec g(dim_);
                g[best] = sign;
                return g;
            }
            case DomainKind::ball:
                return -radial_unit(x);
            case DomainKind::annulus: {
                double r = radius(x);
                return (r - r_in_ <= r_out_ - r) ? radial_unit(x) : -radial_unit(x);
            }
        }
        return Vec(dim_);
    }

    /// Nearest boundary point (exact for these shapes).
    Vec project_to_boundary(const Vec& x) const {
        switch (kind_) {
            case DomainKind::interval:
                return (x[0] - lo_[0] <= hi_[0] - x[0]) ? Vec{lo_[0]} : Vec{hi_[0]};
            case DomainKind::box: {
                int best = 0;
                double target = lo_[0], bestv = x[0] - lo_[0];
                for (int i = 0; i < dim_; ++i) {
                    if (x[i] - lo_[i] < bestv) { bestv = x[i] - lo_[i]; best = i; target = lo_[i]; }
                    if (hi_[i] - x[i] < bestv) { bestv = hi_[i] - x[i]; best = i; target = hi_[i]; }
                }
                Vec p = x;
                p[best] = target;
                return p;
            }
            case DomainKind::ball:
                return center_ + r_out_ * radial_unit(x);
            case DomainKind::annulus: {
                double r = radius(x);
                double wall = (r - r_in_ <= r_out_ - r) ? r_in_ : r_out_;
                return center_ + wall * radial_unit(x);
            }
        }
        return x;
    }

    /// Upper bound on |D^2 level| near the boundary: 0 for flat faces,
    /// 1/r for a ball, 1/r_in for the annulus inner wall.
    double curvature_bound() const { return curvature_; }

    Vec bbox_lo() const { return lo_; }
    Vec bbox_hi() const { return hi_; }
    double diameter() const { return (hi_ - lo_).norm(); }

    /// Center / radii accessors (ball and annulus only).
    Vec center() const { return center_; }
    double r_inner() const { return r_in_; }
    double r_outer() const { return r_out_; }

    /// Extent of the thinnest direction (annulus: the gap width).
    double thinnest_extent() const {
        if (kind_ == DomainKind::annulus) return r_out_ - r_in_;
        double v = hi_[0] - lo_[0];
        for (int i = 0; i < dim_; ++i) v = std::min(v, hi_[i] - lo_[i]);
        return v;
    }

    static Domain interval(double a, double b) {
        if (!(a < b)) throw InvalidSpecError("interval: need a < b");
        Domain d;
        d.kind_ = DomainKind::interval;
        d.dim_ = 1;
        d.lo_ = Vec{a};
        d.hi_ = Vec{b};
        d.curvature_ = 0.0;
        return d;
    }

    static Domain box(const Vec& lo, const Vec& hi) {
        if (lo.dim() != hi.dim() || lo.dim() < 1) throw InvalidSpecError("box: bad corners");
        for (int i = 0; i < lo.dim(); ++i)
            if (!(lo[i] < hi[i])) throw InvalidSpecError("box: need lo < hi per axis");
        Domain d;
        d.kind_ = DomainKind::box;
        d.dim_ = lo.dim();
        d.lo_ = lo;
        d.hi_ = hi;
        d.curvature_ = 0.0;
        return d;
    }

    static Domain ball(const Vec& center, double r) {
        if (!(r > 0.0)) throw InvalidSpecError("ball: need r > 0");
        Domain d;
        d.kind_ = DomainKind::ball;
        d.dim_ = center.dim();
        d.center_ = center;
        d.r_out_ = r;
        d.curvature_ = 1.0 / r;
        d.set_bbox_from_radius(r);
        return d;
    }

    static Domain annulus(double r_in, double r_out, const Vec& center) {
        if (!(0.0 < r_in && r_in < r_out)) throw InvalidSpecError("annulus: need 0 < r_in < r_out");
        Domain d;
        d.kind_ = DomainKind::annulus;
        d.dim_ = center.dim();
        d.center_ = center;
        d.r_in_ = r_in;
        d.r_out_ = r_out;
        d.curvature_ = 1.0 / r_in;
        d.set_bbox_from_radius(r_out);
        return d;
    }

private:
    double radius(const Vec& x) const { return (x - center_).norm(); }
    Vec radial_unit(const Vec& x) const {
        Vec d = x - center_;
        double n = d.norm();
        if (n < 1e-300) return Vec::axis(dim_, 0);
        return d * (1.0 / n);
    }
    void set_bbox_from_radius(double r) {
        lo_ = center_;
        hi_ = center_;
        for (int i = 0; i < dim_; ++i) {
            lo_[i] -= r;
            hi_[i] += r;
        }
    }

    DomainKind kind_ = DomainKind::interval;
    int dim_ = 1;
    Vec lo_{0.0}, hi_{1.0};
    Vec center_{};
    double r_in_ = 0.0, r_out_ = 0.0;
    double curvature_ = 0.0;
};

/// Lattice over the closed domain, anchored at the bounding-box corner.
///
/// Node order is lexicographic in the integer coordinates (first axis most
/// significant); coordinates are exact multiples of the spacing offset by the
/// origin. Nodes with level < spacing form the absorbing boundary layer.
class Grid {
public:
    Grid(const Domain& domain, double spacing)
        : domain_(domain), spacing_(spacing), dim_(domain.dim()) {
        if (!(spacing > 0.0)) throw InvalidSpecError("build_grid: spacing must be > 0");
        double extent = domain.thinnest_extent();
        if (extent < 2.0 * spacing - kBallTol)
            throw InvalidSpecError("build_grid: spacing too coarse; need spacing <= " +
                                   std::to_string(extent / 2.0));
        origin_ = domain.bbox_lo();
        Vec hi = domain.bbox_hi();
        std::int64_t total = 1;
        for (int i = 0; i < dim_; ++i) {
            counts_[i] = static_cast<int>(std::floor((hi[i] - origin_[i]) / spacing + kBallTol)) + 1;
            total *= counts_[i];
        }
        cell_to_node_.assign(static_cast<std::size_t>(total), -1);

        std::array<int, kMaxDim> k{};
        for (;;) {
            Vec x = point_at(k);
            double lev = domain.level(x);
            if (lev >= -kBallTol) {
                int id = static_cast<int>(nodes_.size());
                nodes_.push_back(x);
                coords_.push_back(k);
                boundary_.push_back(lev < spacing ? 1 : 0);
                cell_to_node_[flat_index(k)] = id;
            }
            // lexicographic advance, last axis fastest
            int axis = dim_ - 1;
            while (axis >= 0 && ++k[axis] >= counts_[axis]) k[axis--] = 0;
            if (axis < 0) break;
        }
    }

    const Domain& domain() const { return domain_; }
    double spacing() const { return spacing_; }
    int dim() const { return dim_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    const Vec& node(int id) const { return nodes_[id]; }
    bool is_boundary(int id) const { return boundary_[id] != 0; }
    const std::array<int, kMaxDim>& coords(int id) const { return coords_[id]; }
    Vec origin() const { return origin_; }

    int interior_count() const {
        int n = 0;
        for (auto b : boundary_) n += (b == 0);
        return n;
    }

    /// Node id at integer lattice coordinates, or -1 if no node there.
    int node_at(const std::array<int, kMaxDim>& k) const {
        for (int i = 0; i < dim_; ++i)
            if (k[i] < 0 || k[i] >= counts_[i]) return -1;
        return cell_to_node_[flat_index(k)];
    }

    /// Nearest node to an arbitrary point, or -1 when the rounded cell is empty.
    int nearest_node(const Vec& x) const {
        std::array<int, kMaxDim> k{};
        for (int i = 0; i < dim_; ++i)
            k[i] = static_cast<int>(std::lround((x[i] - origin_[i]) / spacing_));
        return node_at(k);
    }

    /// Integer offsets whose lattice displacement lies in the closed eps-ball.
    /// Membership ties at |y-x| = eps resolve inclusively (absolute 1e-12).
    std::vector<std::array<int, kMaxDim>> ball_offsets(double eps) const {
        if (eps < spacing_ - kBallTol)
            throw InvalidSpecError("ball_neighbors: eps < spacing would leave no admissible move");
        int reach = static_cast<int>(std::floor(eps / spacing_ + kBallTol));
        std::vector<std::array<int, kMaxDim>> offsets;
        std::array<int, kMaxDim> o{};
        enumerate_offsets(0, reach, eps, o, offsets);
        return offsets;
    }

private:
    void enumerate_offsets(int axis, int reach, double eps, std::array<int, kMaxDim>& o,
                           std::vector<std::array<int, kMaxDim>>& out) const {
        if (axis == dim_) {
            double d2 = 0.0;
            for (int i = 0; i < dim_; ++i) d2 += double(o[i]) * o[i];
            if (spacing_ * std::sqrt(d2) <= eps + kBallTol) out.push_back(o);
            return;
        }
        for (int v = -reach; v <= reach; ++v) {
            o[axis] = v;
            enumerate_offsets(axis + 1, reach, eps, o, out);
        }
        o[axis] = 0;
    }

    Vec point_at(const std::array<int, kMaxDim>& k) const {
        Vec x(dim_);
        for (int i = 0; i < dim_; ++i) x[i] = origin_[i] + k[i] * spacing_;
        return x;
    }
    std::size_t flat_index(const std::array<int, kMaxDim>& k) const {
        std::size_t idx = 0;
        for (int i = 0; i < dim_; ++i) idx = idx * counts_[i] + k[i];
        return idx;
    }

    Domain domain_;
    double spacing_;
    int dim_;
    Vec origin_;
    std::array<int, kMaxDim> counts_{};
    std::vector<Vec> nodes_;
    std::vector<std::array<int, kMaxDim>> coords_;
    std::vector<std::uint8_t> boundary_;
    std::vector<int> cell_to_node_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr build_grid(const Domain& domain, double spacing) {
    return std::make_shared<Grid>(domain, spacing);
}

/// Grid node ids within the closed eps-ball of a node, the node itself included.
inline std::vector<int> ball_neighbors(const Grid& grid, int node_id, double eps) {
    auto offsets = grid.ball_offsets(eps);
    const auto& k0 = grid.coords(node_id);
    std::vector<int> out;
    out.reserve(offsets.size());
    for (const auto& o : offsets) {
        std::array<int, kMaxDim> k = k0;
        for (int i = 0; i < grid.dim(); ++i) k[i] += o[i];
        int id = grid.node_at(k);
        if (id >= 0) out.push_back(id);
    }
    return out;
}

/// Compressed per-node neighbor lists for one (grid, eps) pair.
struct BallStencil {
    BallStencil(const Grid& grid, double eps) {
        auto offsets = grid.ball_offsets(eps);
        row.assign(grid.size() + 1, 0);
        ids.reserve(static_cast<std::size_t>(grid.size()) * offsets.size());
        for (int n = 0; n < grid.size(); ++n) {
            const auto& k0 = grid.coords(n);
            for (const auto& o : offsets) {
                std::array<int, kMaxDim> k = k0;
                for (int i = 0; i < grid.dim(); ++i) k[i] += o[i];
                int id = grid.node_at(k);
                if (id >= 0) ids.push_back(id);
            }
            row[n + 1] = static_cast<int>(ids.size());
        }
    }
    std::vector<int> row;
    std::vector<int> ids;
};

/// Real values attached to grid nodes.
struct GridFunction {
    GridFunction() = default;
    GridFunction(GridPtr g, double fill = 0.0)
        : grid(std::move(g)), values(static_cast<std::size_t>(grid->size()), fill) {}

    GridPtr grid;
    std::vector<double> values;

    double operator[](int id) const { return values[id]; }
    double& operator[](int id) { return values[id]; }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

}  // namespace itow
