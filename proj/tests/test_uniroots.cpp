// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "diagcheb/uniroots.hpp"

using namespace diagcheb;

namespace {

UniPoly from_roots(const std::vector<double>& rs, double scale = 1.0) {
    UniPoly p = UniPoly::constant(scale);
    for (double r : rs) p = p * UniPoly({-r, 1.0});
    return p;
}

// 1 - x_j^2 in d variables
MultiPoly box_constraint(int d, int j) {
    MultiPoly g = MultiPoly::constant(d, 1.0);
    std::vector<int> e(static_cast<std::size_t>(d), 0);
    e[static_cast<std::size_t>(j)] = 2;
    g.add_term(Monomial(std::move(e)), -1.0);
    return g;
}

}  // namespace

TEST_CASE("isolate_real_roots basics", "[uniroots]") {
    SECTION("1 - t^2") {
        const auto roots = isolate_real_roots(UniPoly({1.0, 0.0, -1.0}), 1e-10);
        REQUIRE(roots.size() == 2);
        CHECK(roots[0] == Catch::Approx(-1.0).margin(1e-10));
        CHECK(roots[1] == Catch::Approx(1.0).margin(1e-10));
    }
    SECTION("t^2 + 1 has no real roots") {
        CHECK(isolate_real_roots(UniPoly({1.0, 0.0, 1.0})).empty());
    }
    SECTION("recover constructed roots") {
        const auto roots = isolate_real_roots(from_roots({0.25, 0.5, 3.0}), 1e-10);
        REQUIRE(roots.size() == 3);
        CHECK(roots[0] == Catch::Approx(0.25).margin(1e-10));
        CHECK(roots[1] == Catch::Approx(0.5).margin(1e-10));
        CHECK(roots[2] == Catch::Approx(3.0).margin(1e-10));
    }
    SECTION("double root via the gcd tail") {
        const auto roots = isolate_real_roots(from_roots({1.0, 1.0, -2.0}), 1e-10);
        REQUIRE(roots.size() == 2);
        CHECK(roots[0] == Catch::Approx(-2.0).margin(1e-9));
        CHECK(roots[1] == Catch::Approx(1.0).margin(1e-9));
    }
    SECTION("zero polynomial is rejected") {
        CHECK_THROWS_AS(isolate_real_roots(UniPoly::zero()), std::invalid_argument);
        CHECK_THROWS_AS(isolate_real_roots(UniPoly({0.0})), std::invalid_argument);
    }
    SECTION("constants have no roots") { CHECK(isolate_real_roots(UniPoly({2.0})).empty()); }
}

TEST_CASE("random factored polynomials: no spurious roots, all recovered", "[uniroots][prop]") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(-2.5, 2.5);
    std::uniform_int_distribution<int> Deg(1, 12);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = Deg(rng);
        std::vector<double> rs;
        while (static_cast<int>(rs.size()) < n) {
            const double c = U(rng);
            bool ok = true;
            for (double r : rs)
                if (std::abs(r - c) < 1e-3) ok = false;
            if (ok) rs.push_back(c);
        }
        std::sort(rs.begin(), rs.end());
        const UniPoly p = from_roots(rs, trial % 2 ? 1.3 : -0.7);
        const auto got = isolate_real_roots(p, 1e-10);
        REQUIRE(got.size() == rs.size());
        for (std::size_t i = 0; i < rs.size(); ++i) {
            // expansion into float coefficients perturbs the true roots; 1e-7
            // absorbs that conditioning at degree <= 12
            CHECK(std::abs(got[i] - rs[i]) < 1e-7);
        }
    }
}

TEST_CASE("nonneg_set", "[uniroots]") {
    SECTION("1 - t^2 -> [-1, 1]") {
        const auto s = nonneg_set(UniPoly({1.0, 0.0, -1.0}));
        REQUIRE(s.size() == 1);
        CHECK(s.intervals()[0].lo == Catch::Approx(-1.0).margin(1e-10));
        CHECK(s.intervals()[0].hi == Catch::Approx(1.0).margin(1e-10));
    }
    SECTION("t -> [0, inf)") {
        const auto s = nonneg_set(UniPoly({0.0, 1.0}));
        REQUIRE(s.size() == 1);
        CHECK(s.intervals()[0].lo == Catch::Approx(0.0).margin(1e-12));
        CHECK(s.intervals()[0].hi_infinite());
    }
    SECTION("(t^2-1)(t^2-4) -> three components") {
        const auto s = nonneg_set(UniPoly({4.0, 0.0, -5.0, 0.0, 1.0}));
        REQUIRE(s.size() == 3);
        CHECK(s.intervals()[0].lo_infinite());
        CHECK(s.intervals()[0].hi == Catch::Approx(-2.0).margin(1e-9));
        CHECK(s.intervals()[1].lo == Catch::Approx(-1.0).margin(1e-9));
        CHECK(s.intervals()[1].hi == Catch::Approx(1.0).margin(1e-9));
        CHECK(s.intervals()[2].lo == Catch::Approx(2.0).margin(1e-9));
        CHECK(s.intervals()[2].hi_infinite());
    }
    SECTION("isolated zero of a negative polynomial") {
        // -(t-1)^2: nonnegative only at t = 1
        const auto s = nonneg_set(UniPoly({-1.0, 2.0, -1.0}));
        REQUIRE(s.size() == 1);
        CHECK(s.intervals()[0].lo == Catch::Approx(1.0).margin(1e-8));
        CHECK(s.intervals()[0].degenerate());
    }
    SECTION("strictly negative polynomial -> empty") {
        CHECK(nonneg_set(UniPoly({-1.0, 0.0, -1.0})).is_empty());
    }

    SECTION("sign correctness on random factored polynomials") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> U(-2.0, 2.0);
        std::uniform_int_distribution<int> Deg(1, 8);
        for (int trial = 0; trial < 40; ++trial) {
            const int n = Deg(rng);
            std::vector<double> rs;
            while (static_cast<int>(rs.size()) < n) {
                const double c = U(rng);
                bool ok = true;
                for (double r : rs)
                    if (std::abs(r - c) < 5e-2) ok = false;
                if (ok) rs.push_back(c);
            }
            const UniPoly p = from_roots(rs, trial % 2 ? 0.9 : -1.1);
            const auto s = nonneg_set(p, 1e-10);
            for (const Interval& iv : s.intervals()) {
                if (!iv.bounded() || iv.degenerate()) continue;
                CHECK(p.eval(0.5 * (iv.lo + iv.hi)) >= -1e-10);
            }
            // complement midpoints must be nonpositive
            const auto ivs = s.intervals();
            for (std::size_t i = 0; i + 1 < ivs.size(); ++i) {
                const double gap_mid = 0.5 * (ivs[i].hi + ivs[i + 1].lo);
                if (!std::isfinite(gap_mid)) continue;
                CHECK(p.eval(gap_mid) <= 1e-10);
            }
        }
    }
}

TEST_CASE("intersect_all", "[uniroots]") {
    const IntervalSet a({Interval::closed(-1.0, 1.0)});
    const IntervalSet b({Interval{0.0, std::numeric_limits<double>::infinity(), true, false}});
    const IntervalSet c({Interval::closed(2.0, 3.0)});

    SECTION("[-1,1] and [0,inf) -> [0,1]") {
        const std::vector<IntervalSet> sets{a, b};
        const auto r = intersect_all(sets);
        REQUIRE(r.size() == 1);
        CHECK(r.intervals()[0].lo == 0.0);
        CHECK(r.intervals()[0].hi == 1.0);
    }
    SECTION("disjoint -> empty") {
        const std::vector<IntervalSet> sets{a, c};
        CHECK(intersect_all(sets).is_empty());
    }
    SECTION("idempotent") {
        const std::vector<IntervalSet> sets{a, a};
        const auto r = intersect_all(sets);
        REQUIRE(r.size() == 1);
        CHECK(r.intervals()[0].lo == -1.0);
        CHECK(r.intervals()[0].hi == 1.0);
    }
    SECTION("commutative and associative on a small corpus") {
        const IntervalSet d({Interval::closed(-0.5, 0.25), Interval::closed(0.75, 4.0)});
        const std::vector<IntervalSet> abc{a, b, d};
        const std::vector<IntervalSet> cba{d, b, a};
        const auto r1 = intersect_all(abc);
        const auto r2 = intersect_all(cba);
        const auto r3 = a.intersect(b.intersect(d));
        REQUIRE(r1.size() == r2.size());
        REQUIRE(r1.size() == r3.size());
        for (std::size_t i = 0; i < r1.size(); ++i) {
            CHECK(r1.intervals()[i].lo == r2.intervals()[i].lo);
            CHECK(r1.intervals()[i].hi == r3.intervals()[i].hi);
        }
    }
    SECTION("empty list rejected") {
        CHECK_THROWS_AS(intersect_all(std::vector<IntervalSet>{}), std::invalid_argument);
    }
}

TEST_CASE("compute_diagonal", "[uniroots]") {
    SECTION("box constraints give [-1, 1]") {
        const std::vector<MultiPoly> g{box_constraint(2, 0), box_constraint(2, 1)};
        const auto r = compute_diagonal(g);
        REQUIRE(r.ok());
        CHECK(r.interval.lo == Catch::Approx(-1.0).margin(1e-10));
        CHECK(r.interval.hi == Catch::Approx(1.0).margin(1e-10));
    }
    SECTION("standard simplex d=2 gives [0, 1/2]") {
        MultiPoly g1 = MultiPoly::variable(2, 0);
        MultiPoly g2 = MultiPoly::variable(2, 1);
        MultiPoly g3 = MultiPoly::constant(2, 1.0);
        g3 -= MultiPoly::variable(2, 0);
        g3 -= MultiPoly::variable(2, 1);
        const std::vector<MultiPoly> g{g1, g2, g3};
        const auto r = compute_diagonal(g);
        REQUIRE(r.ok());
        CHECK(r.interval.lo == Catch::Approx(0.0).margin(1e-10));
        CHECK(r.interval.hi == Catch::Approx(0.5).margin(1e-10));
    }
    SECTION("x1^2 - 1 fails with two unbounded components") {
        MultiPoly g(2);
        g.add_term(Monomial({2, 0}), 1.0);
        g.add_term(Monomial({0, 0}), -1.0);
        const auto r = compute_diagonal(std::vector<MultiPoly>{g});
        REQUIRE_FALSE(r.ok());
        CHECK(r.status == DiagonalStatus::multiple_components);
    }
    SECTION("infeasible diagonal -> empty") {
        MultiPoly g(2);  // -1 - x1^2
        g.add_term(Monomial({0, 0}), -1.0);
        g.add_term(Monomial({2, 0}), -1.0);
        const auto r = compute_diagonal(std::vector<MultiPoly>{g});
        CHECK(r.status == DiagonalStatus::empty);
    }
    SECTION("half line -> unbounded") {
        const auto r = compute_diagonal(std::vector<MultiPoly>{MultiPoly::variable(2, 0)});
        CHECK(r.status == DiagonalStatus::unbounded);
    }
    SECTION("constraint vanishing on the diagonal contributes all of R") {
        MultiPoly anti(2);  // x1 - x2 restricts to 0 on the diagonal
        anti.add_term(Monomial({1, 0}), 1.0);
        anti.add_term(Monomial({0, 1}), -1.0);
        const std::vector<MultiPoly> g{box_constraint(2, 0), anti};
        const auto r = compute_diagonal(g);
        REQUIRE(r.ok());
        CHECK(r.interval.lo == Catch::Approx(-1.0).margin(1e-10));
        CHECK(r.interval.hi == Catch::Approx(1.0).margin(1e-10));
    }
    SECTION("touching pieces merge before the single-interval test") {
        // t^2(1 - t^2) >= 0 on [-1, 1] with a tangency at 0
        MultiPoly g(1);
        g.add_term(Monomial({2}), 1.0);
        g.add_term(Monomial({4}), -1.0);
        const auto r = compute_diagonal(std::vector<MultiPoly>{g});
        REQUIRE(r.ok());
        CHECK(r.interval.lo == Catch::Approx(-1.0).margin(1e-8));
        CHECK(r.interval.hi == Catch::Approx(1.0).margin(1e-8));
    }
    SECTION("empty input rejected") {
        CHECK_THROWS_AS(compute_diagonal(std::vector<MultiPoly>{}), std::invalid_argument);
    }
}
