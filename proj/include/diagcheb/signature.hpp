// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "diagcheb/leastcheb.hpp"
#include "diagcheb/polycore.hpp"
#include "diagcheb/sets.hpp"

namespace diagcheb {

/// Alternating-sign atomic support on the diagonal: n+1 points at the mapped
/// Chebyshev extrema, weights (1/2, 1, ..., 1, 1/2).
struct Signature {
    std::vector<std::vector<double>> points;
    std::vector<int> signs;
    std::vector<double> weights;
    int degree_n = 0;
    double a = 0.0;
    double b = 0.0;
};

/// L = sum tau_i * (evaluation at points[i]), with sum |tau_i| = 1.
struct AtomicFunctional {
    std::vector<std::vector<double>> points;
    std::vector<double> coefficients;
};

inline Signature build_signature(const DDCertificate& c, int n) {
    if (n < 1) throw std::invalid_argument("build_signature: n must be positive");
    c.require_valid();
    const int d = c.dimension();
    Signature s;
    s.degree_n = n;
    s.a = c.a;
    s.b = c.b;
    s.points.reserve(static_cast<std::size_t>(n) + 1);
    for (int j = 1; j <= n + 1; ++j) {
        const double xi = std::cos(static_cast<double>(j - 1) * std::numbers::pi / static_cast<double>(n));
        const double t = c.a + 0.5 * (c.b - c.a) * (1.0 + xi);
        s.points.emplace_back(static_cast<std::size_t>(d), t);
        s.signs.push_back(j % 2 == 1 ? 1 : -1);
        s.weights.push_back(j == 1 || j == n + 1 ? 0.5 : 1.0);
    }
    return s;
}

inline AtomicFunctional build_functional(const Signature& s, int n) {
    if (n < 1) throw std::invalid_argument("build_functional: n must be positive");
    if (static_cast<int>(s.points.size()) != n + 1)
        throw std::invalid_argument("build_functional: signature size does not match degree");
    AtomicFunctional L;
    L.points = s.points;
    L.coefficients.reserve(s.points.size());
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        const double sign = i % 2 == 0 ? 1.0 : -1.0;
        L.coefficients.push_back(sign * s.weights[i] / static_cast<double>(n));
    }
    return L;
}

inline double apply(const AtomicFunctional& L, const MultiPoly& p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < L.points.size(); ++i)
        acc += L.coefficients[i] * eval_multi(p, L.points[i]);
    return acc;
}

struct AnnihilationReport {
    double max_abs = 0.0;
};

namespace detail {

inline double diagonal_parameter(const std::vector<double>& point) {
    for (double v : point)
        if (std::abs(v - point.front()) > 1e-12 * std::max(1.0, std::abs(point.front())))
            throw std::invalid_argument("functional support point is off the diagonal");
    return point.front();
}

}  // namespace detail

/// Max |L(x^beta)| over |beta| <= n-1. All support points sit on the diagonal,
/// so every monomial of degree k reduces to t^k and the multivariate check
/// collapses to the univariate powers.
inline AnnihilationReport verify_annihilation(const AtomicFunctional& L, int n, int d) {
    if (L.points.empty()) throw std::invalid_argument("verify_annihilation: empty functional");
    if (static_cast<int>(L.points.front().size()) != d)
        throw std::invalid_argument("verify_annihilation: dimension mismatch");
    std::vector<double> ts;
    ts.reserve(L.points.size());
    for (const auto& pt : L.points) ts.push_back(detail::diagonal_parameter(pt));

    AnnihilationReport rep;
    for (int k = 0; k <= n - 1; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) acc += L.coefficients[i] * std::pow(ts[i], k);
        rep.max_abs = std::max(rep.max_abs, std::abs(acc));
    }
    return rep;
}

struct DualOptimalityReport {
    double gamma = 0.0;            // common value of L on the degree-n monomials
    double gap = 0.0;              // |gamma - least_norm(a, b, n)|
    double gamma_spread = 0.0;     // max deviation of L(x^alpha) across |alpha| = n
    double max_extremal_dev = 0.0; // max | |P*(omega_i)| - value |
    bool signs_match = true;
};

namespace detail {

inline void enumerate_compositions(int d, int total, std::vector<int>& cur,
                                   const std::function<void(const std::vector<int>&)>& fn) {
    if (static_cast<int>(cur.size()) == d - 1) {
        cur.push_back(total - std::accumulate(cur.begin(), cur.end(), 0));
        fn(cur);
        cur.pop_back();
        return;
    }
    const int used = std::accumulate(cur.begin(), cur.end(), 0);
    for (int e = 0; e <= total - used; ++e) {
        cur.push_back(e);
        enumerate_compositions(d, total, cur, fn);
        cur.pop_back();
    }
}

}  // namespace detail

/// gamma = L(x^alpha) for |alpha| = n (spread checked explicitly at small d, n)
/// and the weak-duality gap against least_norm; also confirms that the support
/// points are extremal for P* with matching signs.
inline DualOptimalityReport verify_dual_optimality(const AtomicFunctional& L, const DDCertificate& c,
                                                   int n) {
    if (n < 1) throw std::invalid_argument("verify_dual_optimality: n must be positive");
    const int d = c.dimension();
    std::vector<double> ts;
    ts.reserve(L.points.size());
    for (const auto& pt : L.points) ts.push_back(detail::diagonal_parameter(pt));

    DualOptimalityReport rep;
    double gamma = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) gamma += L.coefficients[i] * std::pow(ts[i], n);
    rep.gamma = gamma;

    if (d <= 4 && n <= 6) {
        std::vector<int> cur;
        detail::enumerate_compositions(d, n, cur, [&](const std::vector<int>& alpha) {
            const MultiPoly mono = MultiPoly::from_term(Monomial(alpha), 1.0);
            rep.gamma_spread = std::max(rep.gamma_spread, std::abs(apply(L, mono) - gamma));
        });
    }

    const double value = least_norm(c.a, c.b, n);
    rep.gap = std::abs(gamma - value);

    const LeastResult lr = least_polynomial_auto(c, n);
    for (std::size_t i = 0; i < L.points.size(); ++i) {
        const double pv = eval_multi(lr.polynomial, L.points[i]);
        rep.max_extremal_dev = std::max(rep.max_extremal_dev, std::abs(std::abs(pv) - lr.value));
        if (lr.value > 1e-12) {
            const int want = i % 2 == 0 ? 1 : -1;
            if (pv * static_cast<double>(want) < 0.0) rep.signs_match = false;
        }
    }
    return rep;
}

}  // namespace diagcheb
