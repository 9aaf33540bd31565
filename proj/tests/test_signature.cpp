// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "diagcheb/signature.hpp"

using namespace diagcheb;

namespace {
DDCertificate interval_cert(double a, double b, int d) {
    return {std::vector<double>(static_cast<std::size_t>(d), 1.0 / d), a, b,
            DDCertificate::Analytic{}};
}
}  // namespace

TEST_CASE("build_signature places the mapped Chebyshev extrema", "[signature]") {
    SECTION("[-1,1], n=2, d=2") {
        const auto s = build_signature(interval_cert(-1.0, 1.0, 2), 2);
        REQUIRE(s.points.size() == 3);
        CHECK(s.points[0] == std::vector<double>{1.0, 1.0});
        CHECK(s.points[1][0] == Catch::Approx(0.0).margin(1e-15));
        CHECK(s.points[2][0] == Catch::Approx(-1.0));
        CHECK(s.signs == std::vector<int>{1, -1, 1});
        CHECK(s.weights == std::vector<double>{0.5, 1.0, 0.5});
    }
    SECTION("n=1 endpoints only") {
        const auto s = build_signature(interval_cert(0.0, 2.0, 3), 1);
        REQUIRE(s.points.size() == 2);
        CHECK(s.points[0][0] == Catch::Approx(2.0));
        CHECK(s.points[1][0] == Catch::Approx(0.0).margin(1e-15));
        CHECK(s.weights == std::vector<double>{0.5, 0.5});
        CHECK(s.signs == std::vector<int>{1, -1});
    }
    SECTION("[0,1], n=2, d=1") {
        const auto s = build_signature(interval_cert(0.0, 1.0, 1), 2);
        REQUIRE(s.points.size() == 3);
        CHECK(s.points[0][0] == Catch::Approx(1.0));
        CHECK(s.points[1][0] == Catch::Approx(0.5));
        CHECK(s.points[2][0] == Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("support size is n+1 regardless of dimension") {
        for (int d : {1, 2, 5})
            for (int n : {1, 3, 7})
                CHECK(build_signature(interval_cert(-1.0, 1.0, d), n).points.size() ==
                      static_cast<std::size_t>(n) + 1);
    }
    SECTION("signature depends only on the diagonal, not on v") {
        const DDCertificate c1{{1.0, 0.0}, 0.0, 1.0, DDCertificate::Analytic{}};
        const DDCertificate c2{{0.0, 1.0}, 0.0, 1.0, DDCertificate::User{}};
        const auto s1 = build_signature(c1, 4);
        const auto s2 = build_signature(c2, 4);
        CHECK(s1.points == s2.points);
        CHECK(s1.signs == s2.signs);
        CHECK(s1.weights == s2.weights);
    }
}

TEST_CASE("build_functional normalizes to total mass one", "[signature]") {
    SECTION("n=2 -> (1/4, -1/2, 1/4)") {
        const auto fn = build_functional(build_signature(interval_cert(-1.0, 1.0, 2), 2), 2);
        REQUIRE(fn.coefficients.size() == 3);
        CHECK(fn.coefficients[0] == Catch::Approx(0.25));
        CHECK(fn.coefficients[1] == Catch::Approx(-0.5));
        CHECK(fn.coefficients[2] == Catch::Approx(0.25));
    }
    SECTION("n=1 -> (1/2, -1/2)") {
        const auto fn = build_functional(build_signature(interval_cert(0.0, 1.0, 1), 1), 1);
        CHECK(fn.coefficients == std::vector<double>{0.5, -0.5});
    }
    SECTION("n=3 -> (1/6, -1/3, 1/3, -1/6)") {
        const auto fn = build_functional(build_signature(interval_cert(-1.0, 1.0, 1), 3), 3);
        REQUIRE(fn.coefficients.size() == 4);
        CHECK(fn.coefficients[0] == Catch::Approx(1.0 / 6));
        CHECK(fn.coefficients[1] == Catch::Approx(-1.0 / 3));
        CHECK(fn.coefficients[2] == Catch::Approx(1.0 / 3));
        CHECK(fn.coefficients[3] == Catch::Approx(-1.0 / 6));
    }
    SECTION("sum |tau| = 1") {
        for (int n : {1, 2, 5, 8}) {
            const auto fn = build_functional(build_signature(interval_cert(0.0, 2.0, 2), n), n);
            double mass = 0.0;
            for (double t : fn.coefficients) mass += std::abs(t);
            CHECK(mass == Catch::Approx(1.0).margin(1e-12));
        }
    }
    SECTION("size mismatch rejected") {
        const auto s = build_signature(interval_cert(0.0, 1.0, 1), 2);
        CHECK_THROWS_AS(build_functional(s, 3), std::invalid_argument);
    }
}

TEST_CASE("apply evaluates the atomic functional", "[signature]") {
    const auto fn = build_functional(build_signature(interval_cert(-1.0, 1.0, 1), 1), 1);
    CHECK(apply(fn, MultiPoly::variable(1, 0)) == Catch::Approx(1.0));
    CHECK(apply(fn, MultiPoly::zero(1)) == 0.0);

    const auto fn3 = build_functional(build_signature(interval_cert(-1.0, 1.0, 2), 3), 3);
    CHECK(apply(fn3, MultiPoly::constant(2, 1.0)) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("verify_annihilation kills all lower-degree monomials", "[signature]") {
    SECTION("n=3, d=2, [-1,1]") {
        const auto fn = build_functional(build_signature(interval_cert(-1.0, 1.0, 2), 3), 3);
        CHECK(verify_annihilation(fn, 3, 2).max_abs <= 1e-10);
    }
    SECTION("n=1 sends constants to zero") {
        const auto fn = build_functional(build_signature(interval_cert(-1.0, 1.0, 1), 1), 1);
        CHECK(verify_annihilation(fn, 1, 1).max_abs <= 1e-15);
    }
    SECTION("n=4, d=3, [0,1]") {
        const auto fn = build_functional(build_signature(interval_cert(0.0, 1.0, 3), 4), 4);
        CHECK(verify_annihilation(fn, 4, 3).max_abs <= 1e-10);
    }
    SECTION("the full degree grid stays annihilated") {
        for (double a : {-1.0, 0.0})
            for (double b : {1.0, 2.0})
                for (int n = 1; n <= 8; ++n) {
                    const auto fn = build_functional(build_signature(interval_cert(a, b, 2), n), n);
                    INFO("a=" << a << " b=" << b << " n=" << n);
                    CHECK(verify_annihilation(fn, n, 2).max_abs <= 1e-10);
                }
    }
    SECTION("extremality: weighted signed sums vanish on sampled lower monomials") {
        const int n = 4, d = 3;
        const auto sig = build_signature(interval_cert(-1.0, 1.0, d), n);
        for (const std::vector<int>& alpha :
             {std::vector<int>{1, 0, 2}, std::vector<int>{0, 3, 0}, std::vector<int>{1, 1, 1}}) {
            const MultiPoly mono = MultiPoly::from_term(Monomial(alpha), 1.0);
            double acc = 0.0;
            for (std::size_t i = 0; i < sig.points.size(); ++i)
                acc += sig.weights[i] * sig.signs[i] * eval_multi(mono, sig.points[i]);
            CHECK(std::abs(acc) <= 1e-10);
        }
    }
}

TEST_CASE("verify_dual_optimality certifies the least norm", "[signature]") {
    SECTION("cube certificate, n=3: gamma = 1/4") {
        const auto c = interval_cert(-1.0, 1.0, 3);
        const auto fn = build_functional(build_signature(c, 3), 3);
        const auto rep = verify_dual_optimality(fn, c, 3);
        CHECK(rep.gamma == Catch::Approx(0.25).margin(1e-12));
        CHECK(rep.gap <= 1e-10);
        CHECK(rep.gamma_spread <= 1e-10);
        CHECK(rep.max_extremal_dev <= 1e-9);
        CHECK(rep.signs_match);
    }
    SECTION("simplex certificate, n=2: gamma = 1/8") {
        const DDCertificate c{{1.0, 0.0}, 0.0, 1.0, DDCertificate::Analytic{}};
        const auto fn = build_functional(build_signature(c, 2), 2);
        const auto rep = verify_dual_optimality(fn, c, 2);
        CHECK(rep.gamma == Catch::Approx(0.125).margin(1e-12));
        CHECK(rep.gap <= 1e-10);
    }
    SECTION("n=1 on [0,1]: gamma = 1/2") {
        const auto c = interval_cert(0.0, 1.0, 2);
        const auto fn = build_functional(build_signature(c, 1), 1);
        const auto rep = verify_dual_optimality(fn, c, 1);
        CHECK(rep.gamma == Catch::Approx(0.5).margin(1e-12));
        CHECK(rep.gap <= 1e-10);
    }
    SECTION("gamma equals the least norm across the (a, b, n) grid") {
        for (double a : {-1.0, 0.0})
            for (double b : {1.0, 2.0})
                for (int n = 1; n <= 8; ++n) {
                    const auto c = interval_cert(a, b, 2);
                    const auto fn = build_functional(build_signature(c, n), n);
                    const auto rep = verify_dual_optimality(fn, c, n);
                    INFO("a=" << a << " b=" << b << " n=" << n);
                    CHECK(rep.gap <= 1e-9);
                    CHECK(rep.signs_match);
                }
    }
}
