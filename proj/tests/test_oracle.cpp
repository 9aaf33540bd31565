// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "diagcheb/leastcheb.hpp"
#include "diagcheb/oracle.hpp"

using namespace diagcheb;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("remez_monic reproduces the classical values", "[oracle]") {
    SECTION("n=1 on [-1,1]: best constant is 0, error 1") {
        const auto r = remez_monic(1, -1.0, 1.0);
        CHECK(r.value == Catch::Approx(1.0).margin(1e-12));
        CHECK(r.approximant.trimmed(1e-10).is_zero());
    }
    SECTION("n=4 on [-1,1]: value 1/8") {
        const auto r = remez_monic(4, -1.0, 1.0);
        CHECK(r.value == Catch::Approx(0.125).margin(1e-10));
    }
    SECTION("n=3 on [0,1]: value 2^-5") {
        const auto r = remez_monic(3, 0.0, 1.0);
        CHECK(r.value == Catch::Approx(0.03125).margin(1e-10));
    }
    SECTION("matches least_norm over the interval/degree grid") {
        for (double ab : {1.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(3.0)}) {
            for (int n = 1; n <= 12; ++n) {
                const auto r = remez_monic(n, -ab, ab);
                const double want = least_norm(-ab, ab, n);
                INFO("n=" << n << " half-width=" << ab);
                CHECK(std::abs(r.value - want) <= 1e-8 * want);
            }
        }
        for (int n = 1; n <= 12; ++n) {
            const auto r = remez_monic(n, 0.0, 1.0);
            const double want = least_norm(0.0, 1.0, n);
            CHECK(std::abs(r.value - want) <= 1e-8 * want);
        }
    }
    SECTION("equioscillation: n+1 alternating extrema of equal magnitude") {
        for (int n : {2, 5, 9}) {
            const auto r = remez_monic(n, -0.5, 2.0);
            REQUIRE(r.reference.size() == static_cast<std::size_t>(n) + 1);
            double sign = 0.0;
            for (std::size_t i = 0; i < r.reference.size(); ++i) {
                const double t = r.reference[i];
                const double e = std::pow(t, n) - r.approximant.eval(t);
                CHECK(std::abs(std::abs(e) - r.value) <= 1e-9 * std::max(1.0, r.value));
                if (i > 0) CHECK(e * sign < 0.0);
                sign = e;
            }
        }
    }
    SECTION("uniform initialization reaches the same value") {
        const auto a = remez_monic(6, -1.0, 1.0, 50, true);
        const auto b = remez_monic(6, -1.0, 1.0, 50, false);
        CHECK(a.value == Catch::Approx(b.value).epsilon(1e-10));
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(remez_monic(0, -1.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(remez_monic(3, 1.0, 1.0), std::invalid_argument);
    }
}

TEST_CASE("sup_norm_estimate", "[oracle]") {
    SECTION("the constructed polynomial attains its value on the cube") {
        const SetDescription cube(PNormBall{kInf, 1.0, 3});
        const auto cert = certify_analytic(cube);
        REQUIRE(cert);
        const auto lr = least_polynomial(*cert, 4);
        const auto sup = sup_norm_estimate(lr.polynomial, cube, 100000, 31);
        CHECK(sup.max_val == Catch::Approx(0.125).margin(1e-10));
        // the attaining point sits on the diagonal
        for (double c : sup.argmax) CHECK(c == Catch::Approx(sup.argmax[0]).margin(1e-12));
    }
    SECTION("x1 on the unit disk approaches sup = 1") {
        const SetDescription disk(PNormBall{2.0, 1.0, 2});
        const auto sup = sup_norm_estimate(MultiPoly::variable(2, 0), disk, 100000, 17);
        CHECK(sup.max_val >= 0.99);
        CHECK(sup.max_val <= 1.0 + 1e-12);
    }
    SECTION("zero polynomial") {
        const SetDescription disk(PNormBall{2.0, 1.0, 2});
        CHECK(sup_norm_estimate(MultiPoly::zero(2), disk, 100, 1).max_val == 0.0);
    }
}

TEST_CASE("brute_force_least approaches the closed-form least norm", "[oracle][slow]") {
    SECTION("unit disk, n=2: about 1/4") {
        const SetDescription disk(PNormBall{2.0, 1.0, 2});
        const double got = brute_force_least(disk, 2, 10000);
        const double want = least_norm(-1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 2);
        CHECK(want == Catch::Approx(0.25).epsilon(1e-12));
        CHECK(got <= want + 1e-3);
        CHECK(got >= want - 5e-3);
    }
    SECTION("square, n=2: about 1/2") {
        const SetDescription square(PNormBall{kInf, 1.0, 2});
        const double got = brute_force_least(square, 2, 10000);
        CHECK(got <= 0.5 + 1e-3);
        CHECK(got >= 0.5 - 5e-3);
    }
    SECTION("vertical segment, n=2: essentially 0") {
        const SetDescription seg(Segment{{0.0, -std::sqrt(2.0)}, {0.0, std::sqrt(2.0)}});
        const double got = brute_force_least(seg, 2, 2000);
        CHECK(got <= 1e-6);
    }
    SECTION("discretization gap shrinks with the grid") {
        const SetDescription disk(PNormBall{2.0, 1.0, 2});
        const double want = 0.25;
        const double g2 = brute_force_least(disk, 2, 100);
        const double g3 = brute_force_least(disk, 2, 1000);
        const double g4 = brute_force_least(disk, 2, 10000);
        CHECK(g2 <= want + 1e-3);
        CHECK(g3 <= want + 1e-3);
        CHECK(g4 <= want + 1e-3);
        // allow mild non-monotonicity from lattice alignment
        CHECK(std::abs(g4 - want) <= std::abs(g2 - want) + 1e-4);
    }
    SECTION("preconditions") {
        const SetDescription disk(PNormBall{2.0, 1.0, 3});
        CHECK_THROWS_AS(brute_force_least(disk, 2, 1000), std::invalid_argument);
        const SetDescription d2(PNormBall{2.0, 1.0, 2});
        CHECK_THROWS_AS(brute_force_least(d2, 5, 1000), std::invalid_argument);
    }
}
