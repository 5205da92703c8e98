#include <doctest.h>

#include <cmath>
#include <numbers>

#include "itow/isaacs.hpp"
#include "itow/rng.hpp"

using namespace itow;

namespace {

// Independent oracle: exhaustive grids over both direction layers AND both
// intensity intervals (no analytic endpoint shortcut, no refinement).
double brute_force_bounded(const Vec& p, const SymMat& S, double k, double l, Side side,
                           int n_angle = 720, int n_scalar = 9) {
    const double two_pi = 2.0 * std::numbers::pi;
    auto dir = [&](int i) { return Vec{std::cos(two_pi * i / n_angle), std::sin(two_pi * i / n_angle)}; };
    auto scalar = [&](int i, double bound) { return bound * i / (n_scalar - 1); };
    double outer = (side == Side::minus) ? std::numeric_limits<double>::infinity()
                                         : -std::numeric_limits<double>::infinity();
    for (int ia = 0; ia < n_angle; ++ia) {
        for (int ic = 0; ic < n_scalar; ++ic) {
            Vec u = dir(ia);
            double s = scalar(ic, side == Side::minus ? k : l);
            double inner = (side == Side::minus) ? -std::numeric_limits<double>::infinity()
                                                 : std::numeric_limits<double>::infinity();
            for (int ib = 0; ib < n_angle; ++ib)
                for (int id = 0; id < n_scalar; ++id) {
                    Vec v = dir(ib);
                    double t = scalar(id, side == Side::minus ? l : k);
                    double val = (side == Side::minus) ? hamiltonian(u, v, s, t, p, S)
                                                       : hamiltonian(v, u, t, s, p, S);
                    inner = (side == Side::minus) ? std::max(inner, val) : std::min(inner, val);
                }
            outer = (side == Side::minus) ? std::min(outer, inner) : std::max(outer, inner);
        }
    }
    return outer;
}

SymMat random_sym2(CounterRng& rng) {
    SymMat s(2);
    s.set(0, 0, 2.0 * rng.uniform() - 1.0);
    s.set(1, 1, 2.0 * rng.uniform() - 1.0);
    s.set(0, 1, 2.0 * rng.uniform() - 1.0);
    return s;
}

Vec random_unit2(CounterRng& rng) { return Vec{rng.normal(), rng.normal()}.normalized(); }

}  // namespace

TEST_SUITE_BEGIN("isaacs");

TEST_CASE("hamiltonian hand values") {
    SymMat I2 = SymMat::identity(2);
    SymMat S(2);
    S.set(0, 0, 3.0);
    S.set(0, 1, -2.0);
    S.set(1, 1, 0.5);

    // zero relative displacement: only the drift term
    CHECK(hamiltonian(Vec{1.0, 0.0}, Vec{1.0, 0.0}, 1, 1, Vec{1.0, 0.0}, S) ==
          doctest::Approx(-4.0).epsilon(1e-14));
    // opposite directions: only the diffusion term
    CHECK(hamiltonian(Vec{1.0, 0.0}, Vec{-1.0, 0.0}, 3, 7, Vec{5.0, -1.0}, I2) ==
          doctest::Approx(-2.0).epsilon(1e-14));
    // mixed: -1/2 * 2 - 3 * 1
    CHECK(hamiltonian(Vec{0.0, 1.0}, Vec{1.0, 0.0}, 2, 1, Vec{1.0, 0.0}, I2) ==
          doctest::Approx(-4.0).epsilon(1e-14));
}

TEST_CASE("hamiltonian rejects non-unit directions and negative intensities") {
    SymMat I2 = SymMat::identity(2);
    CHECK_THROWS_AS(hamiltonian(Vec{0.5, 0.0}, Vec{1.0, 0.0}, 0, 0, Vec{1.0, 0.0}, I2),
                    std::domain_error);
    CHECK_THROWS_AS(hamiltonian(Vec{1.0, 0.0}, Vec{1.0, 0.0}, -1, 0, Vec{1.0, 0.0}, I2),
                    std::domain_error);
}

TEST_CASE("hamiltonian is jointly linear in (p, S)") {
    CounterRng rng(11, 0);
    for (int it = 0; it < 50; ++it) {
        Vec a = random_unit2(rng), b = random_unit2(rng);
        Vec p{rng.normal(), rng.normal()};
        SymMat S = random_sym2(rng);
        double c = 3.0 * rng.uniform(), d = 3.0 * rng.uniform();
        double one = hamiltonian(a, b, c, d, p, S);
        double two = hamiltonian(a, b, c, d, 2.0 * p, 2.0 * S);
        CHECK(two == doctest::Approx(2.0 * one).epsilon(1e-12));
    }
}

TEST_CASE("isaacs_limit branch values") {
    SymMat I2 = SymMat::identity(2);
    CHECK(isaacs_limit(Vec{1.0, 0.0}, I2) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(isaacs_limit(Vec(2), SymMat::identity(2, 3.0)) == doctest::Approx(-6.0).epsilon(1e-14));
    SymMat D(2);
    D.set(0, 0, 1.0);
    D.set(1, 1, -1.0);
    CHECK(isaacs_limit(Vec{1.0, 1.0}, D) == doctest::Approx(0.0).epsilon(1e-14));
    SymMat bad(2);
    bad.set(0, 0, 1.0);
    bad.set(1, 1, 2.0);
    CHECK_THROWS_AS(isaacs_limit(Vec(2), bad), OutsideDomainError);
}

TEST_CASE("isaacs_limit is 0-homogeneous and even in p") {
    CounterRng rng(13, 0);
    for (int it = 0; it < 50; ++it) {
        Vec p{rng.normal(), rng.normal()};
        SymMat S = random_sym2(rng);
        double base = isaacs_limit(p, S);
        CHECK(isaacs_limit(3.7 * p, S) == doctest::Approx(base).epsilon(1e-12));
        CHECK(isaacs_limit(-p, S) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("bounded operator on reference queries") {
    Vec p{1.0, 0.0};
    SymMat I2 = SymMat::identity(2);
    IsaacsQuery q(p, I2, 10, 10);
    CHECK(isaacs_bounded(q, Side::minus) == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(isaacs_bounded(q, Side::plus) == doctest::Approx(-2.0).epsilon(1e-6));

    IsaacsQuery qz(p, SymMat(2), 5, 3);
    CHECK(isaacs_bounded(qz, Side::minus) == doctest::Approx(0.0).epsilon(1e-9));

    IsaacsQuery q0(p, I2, 0, 0);
    CHECK(isaacs_bounded(q0, Side::minus) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("bounded operator in one dimension is exact") {
    Vec p{2.0};
    SymMat S(1);
    S.set(0, 0, 0.7);
    IsaacsQuery q(p, S, 10, 10);
    CHECK(isaacs_limit(p, S) == doctest::Approx(-1.4).epsilon(1e-14));
    CHECK(isaacs_bounded(q, Side::minus) == doctest::Approx(-1.4).epsilon(1e-12));
    CHECK(isaacs_bounded(q, Side::plus) == doctest::Approx(-1.4).epsilon(1e-12));
}

TEST_CASE("bounded operator in three dimensions approaches the limit") {
    Vec p{1.0, 0.0, 0.0};
    SymMat I3 = SymMat::identity(3);
    IsaacsQuery q(p, I3, 10, 10);
    CHECK(isaacs_bounded(q, Side::minus) == doctest::Approx(-2.0).epsilon(5e-3));
    CHECK(isaacs_bounded(q, Side::plus) == doctest::Approx(-2.0).epsilon(5e-3));
}

TEST_CASE("bounded operator matches the exhaustive grid oracle") {
    CounterRng rng(17, 0);
    for (int it = 0; it < 4; ++it) {
        Vec p = random_unit2(rng);
        SymMat S = random_sym2(rng);
        double k = 1.0 + 4.0 * rng.uniform();
        double l = 1.0 + 4.0 * rng.uniform();
        IsaacsQuery q(p, S, k, l);
        for (Side side : {Side::minus, Side::plus}) {
            double got = isaacs_bounded(q, side);
            double ref = brute_force_bounded(p, S, k, l, side);
            CHECK(std::abs(got - ref) <= 0.01);  // oracle grid resolution dominates
        }
    }
}

TEST_CASE("saddle sandwich: fixed opponent replies bracket the bounded values") {
    const double two_pi = 2.0 * std::numbers::pi;
    CounterRng rng(19, 0);
    for (int it = 0; it < 10; ++it) {
        Vec p = random_unit2(rng);
        SymMat S = random_sym2(rng);
        double k = 1.0 + 6.0 * rng.uniform(), l = 1.0 + 6.0 * rng.uniform();
        IsaacsQuery q(p, S, k, l);
        double lminus = isaacs_bounded(q, Side::minus);
        double lplus = isaacs_bounded(q, Side::plus);
        for (int probe = 0; probe < 5; ++probe) {
            Vec bhat = random_unit2(rng);
            double dhat = l * rng.uniform();
            Vec ahat = random_unit2(rng);
            double chat = k * rng.uniform();
            // dense scans of the replying side
            double min_reply = std::numeric_limits<double>::infinity();
            double max_reply = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < 2000; ++i) {
                Vec u{std::cos(two_pi * i / 2000), std::sin(two_pi * i / 2000)};
                for (double s : {0.0, k})
                    min_reply = std::min(min_reply, hamiltonian(u, bhat, s, dhat, p, S));
                for (double s : {0.0, l})
                    max_reply = std::max(max_reply, hamiltonian(ahat, u, chat, s, p, S));
            }
            CHECK(lminus >= min_reply - 1e-9);  // minus majorizes any fixed maximizer reply line
            CHECK(lplus <= max_reply + 1e-9);
        }
    }
}

TEST_CASE("intensity optima sit at the interval endpoints") {
    CounterRng rng(23, 0);
    for (int it = 0; it < 30; ++it) {
        Vec a = random_unit2(rng), b = random_unit2(rng);
        Vec p{rng.normal(), rng.normal()};
        SymMat S = random_sym2(rng);
        double k = 5.0, d = 2.0 * rng.uniform();
        double lo = hamiltonian(a, b, 0.0, d, p, S);
        double hi = hamiltonian(a, b, k, d, p, S);
        for (int i = 0; i <= 100; ++i) {
            double c = k * i / 100.0;
            double v = hamiltonian(a, b, c, d, p, S);
            CHECK(v <= std::max(lo, hi) + 1e-12);
            CHECK(v >= std::min(lo, hi) - 1e-12);
        }
    }
}

TEST_CASE("diagnostics: identity Hessian converges in one step on the minus side") {
    Diagnostics d = isaacs_diagnostics(Vec{1.0, 0.0}, SymMat::identity(2), 1);
    REQUIRE(d.rows.size() == 1);
    CHECK(d.rows[0].lambda_minus == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(d.rows[0].lambda_limit == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("diagnostics propagates the outside-domain error") {
    SymMat bad(2);
    bad.set(0, 0, 1.0);
    bad.set(1, 1, 2.0);
    CHECK_THROWS_AS(isaacs_diagnostics(Vec(2), bad, 2), OutsideDomainError);
}

TEST_CASE("diagnostics: zero Hessian has zero gaps for every n") {
    Diagnostics d = isaacs_diagnostics(Vec{1.0, 0.0}, SymMat(2), 3);
    for (const auto& row : d.rows) {
        CHECK(std::abs(row.gap_plus) <= 1e-9);
        CHECK(std::abs(row.gap_minus) <= 1e-9);
    }
    CHECK(d.converged);
}

TEST_CASE("diagnostics: random pair at n = 64 sits within 0.05 of the limit") {
    CounterRng rng(29, 0);
    Vec p{0.6, 0.8};
    SymMat S = random_sym2(rng);
    IsaacsQuery q(p, S, 64, 64);
    double limit = isaacs_limit(p, S);
    CHECK(std::abs(isaacs_bounded(q, Side::plus) - limit) <= 0.05);
    CHECK(std::abs(isaacs_bounded(q, Side::minus) - limit) <= 0.05);
}

TEST_CASE("gap shrinks between n = 4 and n = 64") {
    CounterRng rng(31, 0);
    for (int it = 0; it < 5; ++it) {
        Vec p = random_unit2(rng);
        SymMat S = random_sym2(rng);
        double limit = isaacs_limit(p, S);
        auto gap = [&](int n, Side side) {
            IsaacsQuery q(p, S, n, n);
            return std::abs(isaacs_bounded(q, side) - limit);
        };
        CHECK(gap(64, Side::minus) <= gap(4, Side::minus) + 1e-9);
        CHECK(gap(64, Side::plus) <= gap(4, Side::plus) + 1e-9);
    }
}

TEST_SUITE_END();
