// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "diagcheb/json_io.hpp"
#include "diagcheb/polycore.hpp"

using namespace diagcheb;

namespace {

double max_coeff_diff(const MultiPoly& a, const MultiPoly& b) {
    double worst = 0.0;
    for (const auto& [m, c] : a.terms()) worst = std::max(worst, std::abs(c - b.coeff(m)));
    for (const auto& [m, c] : b.terms()) worst = std::max(worst, std::abs(c - a.coeff(m)));
    return worst;
}

MultiPoly bivariate_from_uni(const UniPoly& u, int dim, int var) {
    AffineForm f;
    f.weights.assign(static_cast<std::size_t>(dim), 0.0);
    f.weights[static_cast<std::size_t>(var)] = 1.0;
    return compose_affine(u, f);
}

}  // namespace

TEST_CASE("chebyshev_coeffs matches the recurrence", "[polycore]") {
    CHECK(chebyshev_coeffs(0).coeffs() == std::vector<double>{1.0});
    CHECK(chebyshev_coeffs(1).coeffs() == std::vector<double>{0.0, 1.0});
    CHECK(chebyshev_coeffs(3).coeffs() == std::vector<double>{0.0, -3.0, 0.0, 4.0});

    for (int n = 1; n <= 20; ++n)
        CHECK(chebyshev_coeffs(n)[n] == Catch::Approx(std::exp2(n - 1)).epsilon(0));

    SECTION("extremal values at the Chebyshev points") {
        for (int n = 1; n <= 12; ++n) {
            const UniPoly tn = chebyshev_coeffs(n);
            for (int k = 0; k <= n; ++k) {
                const double x = std::cos(k * std::numbers::pi / n);
                const double want = k % 2 == 0 ? 1.0 : -1.0;
                CHECK(std::abs(tn.eval(x) - want) < 1e-10);
            }
        }
    }

    CHECK_THROWS_AS(chebyshev_coeffs(-1), std::invalid_argument);
}

TEST_CASE("eval_multi", "[polycore]") {
    MultiPoly p(2);
    p.add_term(Monomial({1, 1}), 1.0);  // x1*x2
    CHECK(eval_multi(p, {2.0, 3.0}) == Catch::Approx(6.0));

    const MultiPoly t3 = bivariate_from_uni(chebyshev_coeffs(3), 2, 0);
    CHECK(eval_multi(t3, {0.5, 123.0}) == Catch::Approx(-1.0));

    CHECK(eval_multi(MultiPoly::zero(2), {1.0, 2.0}) == 0.0);

    CHECK_THROWS_AS(eval_multi(p, {1.0}), std::invalid_argument);

    SECTION("PolyEvaluator agrees with eval_multi") {
        const PolyEvaluator ev(t3);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> U(-2.0, 2.0);
        for (int i = 0; i < 50; ++i) {
            std::vector<double> x{U(rng), U(rng)};
            CHECK(ev(x) == Catch::Approx(eval_multi(t3, x)).margin(1e-12));
        }
    }
}

TEST_CASE("compose_affine expands correctly", "[polycore]") {
    SECTION("t^2 with v=(1,1), c=0") {
        const MultiPoly p = compose_affine(UniPoly::power(2), AffineForm{{1.0, 1.0}, 0.0});
        CHECK(p.coeff(Monomial({2, 0})) == Catch::Approx(1.0));
        CHECK(p.coeff(Monomial({1, 1})) == Catch::Approx(2.0));
        CHECK(p.coeff(Monomial({0, 2})) == Catch::Approx(1.0));
        CHECK(p.terms().size() == 3);
    }
    SECTION("t with v=(1/2,1/2), c=-1") {
        const MultiPoly p = compose_affine(UniPoly::power(1), AffineForm{{0.5, 0.5}, -1.0});
        CHECK(p.coeff(Monomial({1, 0})) == Catch::Approx(0.5));
        CHECK(p.coeff(Monomial({0, 1})) == Catch::Approx(0.5));
        CHECK(p.coeff(Monomial({0, 0})) == Catch::Approx(-1.0));
    }
    SECTION("T2 with v=(1,0), c=0") {
        const MultiPoly p = compose_affine(chebyshev_coeffs(2), AffineForm{{1.0, 0.0}, 0.0});
        CHECK(p.coeff(Monomial({2, 0})) == Catch::Approx(2.0));
        CHECK(p.coeff(Monomial({0, 0})) == Catch::Approx(-1.0));
        CHECK(p.terms().size() == 2);
    }

    SECTION("random equivalence against direct evaluation") {
        std::mt19937_64 rng(42);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        std::uniform_int_distribution<int> Deg(0, 8), Dim(1, 4);
        for (int trial = 0; trial < 100; ++trial) {
            const int deg = Deg(rng), d = Dim(rng);
            std::vector<double> uc(static_cast<std::size_t>(deg) + 1);
            for (double& c : uc) c = U(rng);
            const UniPoly u(uc);
            AffineForm f;
            f.weights.resize(static_cast<std::size_t>(d));
            for (double& w : f.weights) w = U(rng);
            f.offset = U(rng);
            const MultiPoly composed = compose_affine(u, f);
            for (int rep = 0; rep < 3; ++rep) {
                std::vector<double> x(static_cast<std::size_t>(d));
                for (double& xi : x) xi = U(rng);
                const double direct = u.eval(f.eval(x));
                const double expanded = eval_multi(composed, x);
                CHECK(std::abs(direct - expanded) <= 1e-9 * std::max(1.0, std::abs(direct)));
            }
        }
    }
}

TEST_CASE("restrict_to_diagonal", "[polycore]") {
    MultiPoly p(2);
    p.add_term(Monomial({1, 1}), 1.0);
    p.add_term(Monomial({1, 0}), 1.0);
    CHECK(restrict_to_diagonal(p).coeffs() == std::vector<double>{0.0, 1.0, 1.0});

    MultiPoly q(2);
    q.add_term(Monomial({0, 0}), 1.0);
    q.add_term(Monomial({2, 0}), -1.0);
    CHECK(restrict_to_diagonal(q).coeffs() == std::vector<double>{1.0, 0.0, -1.0});

    MultiPoly anti(2);
    anti.add_term(Monomial({1, 0}), 1.0);
    anti.add_term(Monomial({0, 1}), -1.0);
    CHECK(restrict_to_diagonal(anti).trimmed(1e-14).is_zero());

    SECTION("composition with an affine form restricts to the scalar composition") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<double> uc(5);
            for (double& c : uc) c = U(rng);
            const UniPoly u(uc);
            AffineForm f{{U(rng), U(rng), U(rng)}, U(rng)};
            const UniPoly got = restrict_to_diagonal(compose_affine(u, f));
            const double slope = f.weights[0] + f.weights[1] + f.weights[2];
            const UniPoly want = compose_scalar_affine(u, slope, f.offset);
            for (int i = 0; i <= std::max(got.degree(), want.degree()); ++i)
                CHECK(std::abs(got[i] - want[i]) <= 1e-10);
        }
    }
}

TEST_CASE("leading_coeff_sum", "[polycore]") {
    MultiPoly p(2);
    p.add_term(Monomial({2, 0}), 1.0);
    p.add_term(Monomial({1, 1}), 1.0);
    p.add_term(Monomial({0, 2}), -1.0);
    CHECK(leading_coeff_sum(p, 2) == Catch::Approx(1.0));

    for (int n : {1, 2, 5, 9}) {
        const UniPoly monic = chebyshev_coeffs(n) * std::exp2(1 - n);
        const MultiPoly q = bivariate_from_uni(monic, 2, 0);
        CHECK(leading_coeff_sum(q, n) == Catch::Approx(1.0).margin(1e-12));
    }

    CHECK(leading_coeff_sum(MultiPoly::constant(2, 5.0), 3) == 0.0);
    CHECK_THROWS_AS(leading_coeff_sum(bivariate_from_uni(UniPoly::power(4), 2, 0), 3),
                    std::invalid_argument);

    SECTION("linearity") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> U(-2.0, 2.0);
        std::uniform_int_distribution<int> E(0, 3);
        for (int trial = 0; trial < 20; ++trial) {
            MultiPoly a(3), b(3);
            for (int t = 0; t < 6; ++t) {
                a.add_term(Monomial({E(rng), E(rng), E(rng)}), U(rng));
                b.add_term(Monomial({E(rng), E(rng), E(rng)}), U(rng));
            }
            const double lhs = leading_coeff_sum(a + b, 9);
            const double rhs = leading_coeff_sum(a, 9) + leading_coeff_sum(b, 9);
            CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
        }
    }
}

TEST_CASE("zero pruning keeps the term map clean", "[polycore]") {
    MultiPoly p(2);
    p.add_term(Monomial({1, 0}), 1.0);
    p.add_term(Monomial({1, 0}), -1.0);
    CHECK(p.is_zero());

    MultiPoly q(2);
    q.add_term(Monomial({1, 1}), 1e-15);  // below the prune threshold
    CHECK(q.is_zero());
}

TEST_CASE("shift_along_ones substitutes x + s*1", "[polycore]") {
    MultiPoly p(2);  // 1 - x1^2
    p.add_term(Monomial({0, 0}), 1.0);
    p.add_term(Monomial({2, 0}), -1.0);
    const MultiPoly shifted = shift_along_ones(p, 0.5);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int i = 0; i < 20; ++i) {
        const std::vector<double> x{U(rng), U(rng)};
        const std::vector<double> xs{x[0] + 0.5, x[1] + 0.5};
        CHECK(eval_multi(shifted, x) == Catch::Approx(eval_multi(p, xs)).margin(1e-12));
    }
}

TEST_CASE("MultiPoly JSON round trip in graded-lex order", "[polycore][json]") {
    MultiPoly p(2);
    p.add_term(Monomial({2, 0}), 1.25);
    p.add_term(Monomial({0, 0}), -3.0);
    p.add_term(Monomial({0, 2}), 2.0);
    p.add_term(Monomial({1, 0}), 0.1);

    const json j = to_json(p);
    REQUIRE(j.at("dim") == 2);
    const auto& terms = j.at("terms");
    REQUIRE(terms.size() == 4);
    // graded-lex: constant, degree-1, then the two degree-2 terms
    CHECK(terms[0].at("exp") == json::array({0, 0}));
    CHECK(terms[1].at("exp") == json::array({1, 0}));
    CHECK(terms[2].at("exp") == json::array({0, 2}));
    CHECK(terms[3].at("exp") == json::array({2, 0}));

    const MultiPoly back = multipoly_from_json(j);
    CHECK(max_coeff_diff(p, back) == 0.0);

    CHECK_THROWS_AS(multipoly_from_json(json{{"dim", 2}}), std::invalid_argument);
}
