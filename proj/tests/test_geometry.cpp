#include <doctest.h>

#include <cmath>
#include <set>

#include "itow/geometry.hpp"
#include "itow/rng.hpp"

using namespace itow;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("level fields are distance-like on the supported shapes") {
    auto interval = Domain::interval(0.0, 1.0);
    CHECK(interval.level(Vec{0.5}) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(interval.level(Vec{0.0}) == 0.0);

    auto ball = Domain::ball(Vec{0.0, 0.0}, 1.0);
    CHECK(std::abs(ball.level(Vec{0.6, 0.8})) <= 1e-12);  // |x| = 1

    auto annulus = Domain::annulus(1.0, 2.0, Vec{0.0, 0.0});
    CHECK(annulus.level(Vec{1.5, 0.0}) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(annulus.level(Vec{0.0, 1.0})) <= 1e-12);
    CHECK(std::abs(annulus.level(Vec{2.0, 0.0})) <= 1e-12);
}

TEST_CASE("degenerate domain parameters are rejected") {
    CHECK_THROWS_AS(Domain::interval(1.0, 1.0), InvalidSpecError);
    CHECK_THROWS_AS(Domain::annulus(2.0, 1.0, Vec{0.0, 0.0}), InvalidSpecError);
    CHECK_THROWS_AS(Domain::annulus(0.0, 1.0, Vec{0.0, 0.0}), InvalidSpecError);
    CHECK_THROWS_AS(Domain::ball(Vec{0.0, 0.0}, 0.0), InvalidSpecError);
}

TEST_CASE("curvature bounds per shape") {
    CHECK(Domain::interval(0, 1).curvature_bound() == 0.0);
    CHECK(Domain::box(Vec{0.0, 0.0}, Vec{1.0, 2.0}).curvature_bound() == 0.0);
    CHECK(Domain::ball(Vec{0.0, 0.0}, 2.0).curvature_bound() == doctest::Approx(0.5));
    CHECK(Domain::annulus(1.0, 2.0, Vec{0.0, 0.0}).curvature_bound() == doctest::Approx(1.0));
}

TEST_CASE("level field is 1-Lipschitz (random pairs, all shapes)") {
    CounterRng rng(42, 0);
    std::vector<Domain> shapes{Domain::interval(-1, 2), Domain::box(Vec{0.0, 0.0}, Vec{2.0, 1.0}),
                               Domain::ball(Vec{0.5, -0.5}, 1.5),
                               Domain::annulus(0.7, 2.2, Vec{0.1, 0.2})};
    for (const auto& d : shapes) {
        for (int it = 0; it < 200; ++it) {
            Vec x(d.dim()), y(d.dim());
            for (int i = 0; i < d.dim(); ++i) {
                x[i] = 4.0 * rng.uniform() - 2.0;
                y[i] = 4.0 * rng.uniform() - 2.0;
            }
            CHECK(std::abs(d.level(x) - d.level(y)) <= (x - y).norm() + 1e-12);
        }
    }
}

TEST_CASE("interval grid: nodes, boundary layer, exact coordinates") {
    auto d = Domain::interval(0.0, 1.0);
    auto g = build_grid(d, 0.25);
    REQUIRE(g->size() == 5);
    CHECK(g->node(0)[0] == 0.0);
    CHECK(g->node(4)[0] == 1.0);
    CHECK(g->is_boundary(0));
    CHECK(g->is_boundary(4));
    for (int i = 1; i <= 3; ++i) CHECK(!g->is_boundary(i));
    // coordinates are exact multiples of the spacing
    for (int i = 0; i < g->size(); ++i)
        CHECK(g->node(i)[0] == g->origin()[0] + g->coords(i)[0] * g->spacing());
}

TEST_CASE("interval grid with 3 nodes at spacing 0.5") {
    auto g = build_grid(Domain::interval(0.0, 1.0), 0.5);
    CHECK(g->size() == 3);
}

TEST_CASE("2D ball node count by enumeration") {
    auto g = build_grid(Domain::ball(Vec{0.0, 0.0}, 1.0), 0.5);
    CHECK(g->size() == 13);
}

TEST_CASE("too-coarse spacing is refused with the required maximum") {
    CHECK_THROWS_AS(build_grid(Domain::interval(0.0, 1.0), 0.6), InvalidSpecError);
    CHECK_THROWS_AS(build_grid(Domain::annulus(1.0, 1.5, Vec{0.0, 0.0}), 0.3), InvalidSpecError);
    // off-lattice right wall at spacing 0.4: nodes stay on the anchored
    // lattice (no snapping); the layer node at 0.8 carries projected data
    auto g = build_grid(Domain::interval(0.0, 1.0), 0.4);
    CHECK(g->size() == 3);
    CHECK(g->node(2)[0] == doctest::Approx(0.8));
    CHECK(g->is_boundary(2));
}

TEST_CASE("interior nodes have all axis neighbors present") {
    auto d = Domain::annulus(1.0, 2.0, Vec{0.0, 0.0});
    auto g = build_grid(d, 1.0 / 16);
    for (int id = 0; id < g->size(); ++id) {
        if (g->is_boundary(id)) continue;
        for (int axis = 0; axis < 2; ++axis)
            for (int dir : {-1, 1}) {
                auto k = g->coords(id);
                k[axis] += dir;
                CHECK(g->node_at(k) >= 0);
            }
    }
}

TEST_CASE("ball_neighbors: 1D includes the node and both neighbors") {
    auto g = build_grid(Domain::interval(0.0, 1.0), 0.25);
    auto nb = ball_neighbors(*g, g->nearest_node(Vec{0.5}), 0.25);
    std::set<double> xs;
    for (int id : nb) xs.insert(g->node(id)[0]);
    CHECK(xs == std::set<double>{0.25, 0.5, 0.75});
}

TEST_CASE("ball_neighbors: 5-point and 9-point stencils in 2D") {
    auto g = build_grid(Domain::box(Vec{0.0, 0.0}, Vec{2.0, 2.0}), 0.25);
    int center = g->nearest_node(Vec{1.0, 1.0});
    REQUIRE(center >= 0);
    CHECK(ball_neighbors(*g, center, 0.25).size() == 5);
    // diagonal distance 0.3536 <= 0.3605 brings in the diagonals
    CHECK(ball_neighbors(*g, center, 0.3605).size() == 9);
}

TEST_CASE("ball_neighbors rejects eps below the spacing") {
    auto g = build_grid(Domain::interval(0.0, 1.0), 0.25);
    CHECK_THROWS_AS(ball_neighbors(*g, 2, 0.2), InvalidSpecError);
}

TEST_CASE("ball membership is symmetric between interior nodes") {
    auto g = build_grid(Domain::annulus(1.0, 2.0, Vec{0.0, 0.0}), 1.0 / 12);
    double eps = 2.0 / 12;
    CounterRng rng(7, 0);
    for (int it = 0; it < 50; ++it) {
        int a = static_cast<int>(rng.uniform() * g->size());
        auto nb = ball_neighbors(*g, a, eps);
        for (int b : nb) {
            auto back = ball_neighbors(*g, b, eps);
            CHECK(std::find(back.begin(), back.end(), a) != back.end());
        }
    }
}

TEST_CASE("halving the spacing keeps the original nodes") {
    auto d = Domain::annulus(1.0, 2.0, Vec{0.0, 0.0});
    auto coarse = build_grid(d, 1.0 / 8);
    auto fine = build_grid(d, 1.0 / 16);
    for (int id = 0; id < coarse->size(); ++id) {
        int fid = fine->nearest_node(coarse->node(id));
        REQUIRE(fid >= 0);
        CHECK((fine->node(fid) - coarse->node(id)).norm() <= 1e-12);
    }
}

TEST_CASE("boundary projection lands on the boundary") {
    std::vector<Domain> shapes{Domain::interval(0, 1), Domain::box(Vec{0.0, 0.0}, Vec{1.0, 2.0}),
                               Domain::ball(Vec{0.0, 0.0}, 1.0),
                               Domain::annulus(1.0, 2.0, Vec{0.0, 0.0})};
    CounterRng rng(3, 0);
    for (const auto& d : shapes)
        for (int it = 0; it < 100; ++it) {
            Vec x(d.dim());
            for (int i = 0; i < d.dim(); ++i)
                x[i] = d.bbox_lo()[i] + (d.bbox_hi()[i] - d.bbox_lo()[i]) * rng.uniform();
            if (d.level(x) < 0) continue;
            CHECK(std::abs(d.level(d.project_to_boundary(x))) <= 1e-10);
        }
}

TEST_SUITE_END();
