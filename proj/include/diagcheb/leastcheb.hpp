// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>

#include "diagcheb/polycore.hpp"
#include "diagcheb/sets.hpp"

namespace diagcheb {

/// Least polynomial with its optimal uniform norm on the certified set.
struct LeastResult {
    MultiPoly polynomial;
    double value = 0.0;
    int degree = 0;
    DDCertificate certificate;
};

/// Optimal uniform norm ((b-a)/2)^n * 2^(1-n) over monic degree-n polynomials
/// on a set with diagonal [a,b].
inline double least_norm(double a, double b, int n) {
    if (n < 1) throw std::invalid_argument("least_norm: n must be positive");
    if (!(a <= b)) throw std::invalid_argument("least_norm: a > b");
    if (a == b) return 0.0;
    return std::pow(0.5 * (b - a), n) * std::exp2(1.0 - static_cast<double>(n));
}

/// Treat a diagonal as degenerate when its width sits at rounding scale.
inline bool is_degenerate_diagonal(const DDCertificate& c) {
    return std::abs(c.b - c.a) <= 1e-12 * std::max({1.0, std::abs(c.a), std::abs(c.b)});
}

/// Scaled Chebyshev composition attaining least_norm(a, b, n); requires a < b.
inline LeastResult least_polynomial(const DDCertificate& c, int n) {
    if (n < 1) throw std::invalid_argument("least_polynomial: n must be positive");
    c.require_valid();
    if (is_degenerate_diagonal(c))
        throw std::invalid_argument("least_polynomial: degenerate diagonal, use degenerate_least_polynomial");

    const double width = c.b - c.a;
    const double scale = std::pow(0.5 * width, n) * std::exp2(1.0 - static_cast<double>(n));
    // single rounding site for the affine map t = 2(<v,x> - a)/(b-a) - 1
    const double slope = 2.0 / width;
    AffineForm map;
    map.weights.resize(c.v.size());
    for (std::size_t i = 0; i < c.v.size(); ++i) map.weights[i] = slope * c.v[i];
    map.offset = -(c.b + c.a) / width;

    const UniPoly tn = chebyshev_coeffs(n) * scale;
    LeastResult out{compose_affine(tn, map), scale, n, c};
    return out;
}

/// Degenerate diagonal a = b: (<v,x> - a)^n vanishes on the whole set, value 0.
inline LeastResult degenerate_least_polynomial(const DDCertificate& c, int n) {
    if (n < 1) throw std::invalid_argument("degenerate_least_polynomial: n must be positive");
    c.require_valid();
    AffineForm form{c.v, -c.a};
    return {compose_affine(UniPoly::power(n), form), 0.0, n, c};
}

/// Route on the diagonal width.
inline LeastResult least_polynomial_auto(const DDCertificate& c, int n) {
    return is_degenerate_diagonal(c) ? degenerate_least_polynomial(c, n) : least_polynomial(c, n);
}

}  // namespace diagcheb
