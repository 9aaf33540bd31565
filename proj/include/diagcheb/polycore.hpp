// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace diagcheb {

/// Coefficients with absolute value below this are dropped after arithmetic.
inline constexpr double kCoeffPruneTol = 1e-14;

/// Exponent vector alpha of a monomial x^alpha.
struct Monomial {
    std::vector<int> exponents;

    Monomial() = default;
    explicit Monomial(std::vector<int> e) : exponents(std::move(e)) {
        for (int v : exponents)
            if (v < 0) throw std::invalid_argument("Monomial: negative exponent");
    }

    int dimension() const { return static_cast<int>(exponents.size()); }
    int degree() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }

    bool operator==(const Monomial& o) const { return exponents == o.exponents; }
};

/// Graded lexicographic order: total degree first, ties broken lexicographically.
struct GradedLexLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        const int da = a.degree(), db = b.degree();
        if (da != db) return da < db;
        return a.exponents < b.exponents;
    }
};

/// Sparse multivariate polynomial over doubles, canonical graded-lex term order.
class MultiPoly {
public:
    using TermMap = std::map<Monomial, double, GradedLexLess>;

    explicit MultiPoly(int dim) : dim_(dim) {
        if (dim < 1) throw std::invalid_argument("MultiPoly: dimension must be positive");
    }

    static MultiPoly zero(int dim) { return MultiPoly(dim); }

    static MultiPoly constant(int dim, double c) {
        MultiPoly p(dim);
        p.add_term(Monomial(std::vector<int>(dim, 0)), c);
        return p;
    }

    /// The coordinate polynomial x_i (0-based index).
    static MultiPoly variable(int dim, int i) {
        if (i < 0 || i >= dim) throw std::invalid_argument("MultiPoly::variable: index out of range");
        std::vector<int> e(dim, 0);
        e[i] = 1;
        MultiPoly p(dim);
        p.add_term(Monomial(std::move(e)), 1.0);
        return p;
    }

    static MultiPoly from_term(Monomial m, double c) {
        MultiPoly p(m.dimension());
        p.add_term(std::move(m), c);
        return p;
    }

    int dimension() const { return dim_; }
    bool is_zero() const { return terms_.empty(); }

    /// Total degree; 0 for the zero polynomial.
    int degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first.degree(); }

    const TermMap& terms() const { return terms_; }

    double coeff(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? 0.0 : it->second;
    }

    void add_term(Monomial m, double c) {
        if (m.dimension() != dim_) throw std::invalid_argument("MultiPoly: term dimension mismatch");
        auto [it, inserted] = terms_.try_emplace(std::move(m), c);
        if (!inserted) it->second += c;
        if (std::abs(it->second) <= kCoeffPruneTol) terms_.erase(it);
    }

    MultiPoly& operator+=(const MultiPoly& o) {
        require_same_dim(o);
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }

    MultiPoly& operator-=(const MultiPoly& o) {
        require_same_dim(o);
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }

    MultiPoly& operator*=(double s) {
        if (s == 0.0) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, c] : terms_) c *= s;
        prune();
        return *this;
    }

    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(MultiPoly a, double s) { return a *= s; }
    friend MultiPoly operator*(double s, MultiPoly a) { return a *= s; }

    MultiPoly operator*(const MultiPoly& o) const {
        require_same_dim(o);
        MultiPoly out(dim_);
        for (const auto& [ma, ca] : terms_) {
            for (const auto& [mb, cb] : o.terms_) {
                std::vector<int> e(static_cast<std::size_t>(dim_));
                for (int i = 0; i < dim_; ++i) e[i] = ma.exponents[i] + mb.exponents[i];
                out.add_term(Monomial(std::move(e)), ca * cb);
            }
        }
        return out;
    }

private:
    void require_same_dim(const MultiPoly& o) const {
        if (o.dim_ != dim_) throw std::invalid_argument("MultiPoly: dimension mismatch");
    }

    void prune() {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (std::abs(it->second) <= kCoeffPruneTol)
                it = terms_.erase(it);
            else
                ++it;
        }
    }

    int dim_;
    TermMap terms_;
};

/// Dense univariate polynomial; coeffs[i] multiplies t^i, trailing zeros trimmed.
class UniPoly {
public:
    UniPoly() = default;
    explicit UniPoly(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { normalize(); }

    static UniPoly zero() { return UniPoly(); }
    static UniPoly constant(double c) { return UniPoly({c}); }

    /// Monomial t^n.
    static UniPoly power(int n) {
        std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
        c.back() = 1.0;
        return UniPoly(std::move(c));
    }

    bool is_zero() const { return coeffs_.empty(); }
    int degree() const { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<double>& coeffs() const { return coeffs_; }

    double operator[](int i) const {
        return (i < 0 || i >= static_cast<int>(coeffs_.size())) ? 0.0 : coeffs_[static_cast<std::size_t>(i)];
    }

    double eval(double t) const {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
        return acc;
    }

    UniPoly derivative() const {
        if (coeffs_.size() <= 1) return UniPoly();
        std::vector<double> d(coeffs_.size() - 1);
        for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<double>(i);
        return UniPoly(std::move(d));
    }

    UniPoly& operator+=(const UniPoly& o) {
        if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
        for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        normalize();
        return *this;
    }

    UniPoly& operator-=(const UniPoly& o) {
        if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
        for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        normalize();
        return *this;
    }

    UniPoly& operator*=(double s) {
        for (double& c : coeffs_) c *= s;
        normalize();
        return *this;
    }

    friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
    friend UniPoly operator-(UniPoly a, const UniPoly& b) { return a -= b; }
    friend UniPoly operator*(UniPoly a, double s) { return a *= s; }
    friend UniPoly operator*(double s, UniPoly a) { return a *= s; }

    UniPoly operator*(const UniPoly& o) const {
        if (is_zero() || o.is_zero()) return UniPoly();
        std::vector<double> out(coeffs_.size() + o.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            for (std::size_t j = 0; j < o.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * o.coeffs_[j];
        return UniPoly(std::move(out));
    }

    /// Drop trailing coefficients with magnitude at most eps.
    UniPoly trimmed(double eps) const {
        std::vector<double> c = coeffs_;
        while (!c.empty() && std::abs(c.back()) <= eps) c.pop_back();
        return UniPoly(std::move(c));
    }

private:
    void normalize() {
        while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
    }

    std::vector<double> coeffs_;
};

/// x -> <weights, x> + offset.
struct AffineForm {
    std::vector<double> weights;
    double offset = 0.0;

    int dimension() const { return static_cast<int>(weights.size()); }

    double eval(std::span<const double> x) const {
        if (x.size() != weights.size()) throw std::invalid_argument("AffineForm: dimension mismatch");
        double acc = offset;
        for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * x[i];
        return acc;
    }
};

/// Chebyshev polynomial T_n in the monomial basis via the three-term recurrence.
/// Coefficients are integers (exact in doubles for the degrees used here).
inline UniPoly chebyshev_coeffs(int n) {
    if (n < 0) throw std::invalid_argument("chebyshev_coeffs: n must be nonnegative");
    if (n == 0) return UniPoly({1.0});
    if (n == 1) return UniPoly({0.0, 1.0});
    std::vector<double> prev = {1.0};       // T_0
    std::vector<double> cur = {0.0, 1.0};   // T_1
    for (int k = 2; k <= n; ++k) {
        std::vector<double> next(static_cast<std::size_t>(k) + 1, 0.0);
        for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += 2.0 * cur[i];
        for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= prev[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return UniPoly(std::move(cur));
}

inline double eval_multi(const MultiPoly& p, std::span<const double> x) {
    if (static_cast<int>(x.size()) != p.dimension())
        throw std::invalid_argument("eval_multi: point dimension mismatch");
    double acc = 0.0;
    for (const auto& [m, c] : p.terms()) {
        double t = c;
        for (int i = 0; i < p.dimension(); ++i) {
            double xi = x[static_cast<std::size_t>(i)];
            for (int e = 0; e < m.exponents[static_cast<std::size_t>(i)]; ++e) t *= xi;
        }
        acc += t;
    }
    return acc;
}

inline double eval_multi(const MultiPoly& p, const std::vector<double>& x) {
    return eval_multi(p, std::span<const double>(x));
}

/// Flattened evaluator for tight sampling loops; one power table per call,
/// no per-term map traversal.
class PolyEvaluator {
public:
    explicit PolyEvaluator(const MultiPoly& p)
        : dim_(p.dimension()), max_deg_(0) {
        coeffs_.reserve(p.terms().size());
        exps_.reserve(p.terms().size() * static_cast<std::size_t>(dim_));
        for (const auto& [m, c] : p.terms()) {
            coeffs_.push_back(c);
            for (int e : m.exponents) {
                exps_.push_back(static_cast<std::uint16_t>(e));
                max_deg_ = std::max(max_deg_, e);
            }
        }
    }

    int dimension() const { return dim_; }

    double operator()(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim_)
            throw std::invalid_argument("PolyEvaluator: point dimension mismatch");
        constexpr int kStack = 256;
        const int stride = max_deg_ + 1;
        std::array<double, kStack> table_stack;
        std::vector<double> table_heap;
        double* table = table_stack.data();
        if (dim_ * stride > kStack) {
            table_heap.resize(static_cast<std::size_t>(dim_) * static_cast<std::size_t>(stride));
            table = table_heap.data();
        }
        for (int i = 0; i < dim_; ++i) {
            double* row = table + i * stride;
            row[0] = 1.0;
            for (int e = 1; e <= max_deg_; ++e) row[e] = row[e - 1] * x[static_cast<std::size_t>(i)];
        }
        double acc = 0.0;
        const std::uint16_t* e = exps_.data();
        for (double c : coeffs_) {
            double t = c;
            for (int i = 0; i < dim_; ++i) t *= table[i * stride + *e++];
            acc += t;
        }
        return acc;
    }

private:
    int dim_;
    int max_deg_;
    std::vector<double> coeffs_;
    std::vector<std::uint16_t> exps_;
};

/// Expand u(<v,x> + c) into the monomial basis (Horner over MultiPoly arithmetic).
inline MultiPoly compose_affine(const UniPoly& u, const AffineForm& f) {
    const int d = f.dimension();
    if (d < 1) throw std::invalid_argument("compose_affine: affine form has no variables");
    MultiPoly lin(d);
    for (int i = 0; i < d; ++i)
        if (f.weights[static_cast<std::size_t>(i)] != 0.0) {
            std::vector<int> e(static_cast<std::size_t>(d), 0);
            e[static_cast<std::size_t>(i)] = 1;
            lin.add_term(Monomial(std::move(e)), f.weights[static_cast<std::size_t>(i)]);
        }
    lin.add_term(Monomial(std::vector<int>(static_cast<std::size_t>(d), 0)), f.offset);

    MultiPoly acc(d);
    for (int i = u.degree(); i >= 0; --i) {
        acc = acc * lin;
        acc.add_term(Monomial(std::vector<int>(static_cast<std::size_t>(d), 0)), u[i]);
    }
    return acc;
}

/// u(scale*t + offset) as a univariate polynomial.
inline UniPoly compose_scalar_affine(const UniPoly& u, double scale, double offset) {
    UniPoly lin({offset, scale});
    UniPoly acc;
    for (int i = u.degree(); i >= 0; --i) {
        acc = acc * lin;
        acc += UniPoly::constant(u[i]);
    }
    return acc;
}

/// Restriction t -> p(t,...,t): coefficient of t^k is the sum of all degree-k coefficients.
inline UniPoly restrict_to_diagonal(const MultiPoly& p) {
    std::vector<double> c(static_cast<std::size_t>(p.degree()) + 1, 0.0);
    for (const auto& [m, coef] : p.terms()) c[static_cast<std::size_t>(m.degree())] += coef;
    return UniPoly(std::move(c));
}

/// Sum of the degree-n coefficients; equals 1 exactly when p is "monic" of degree n.
inline double leading_coeff_sum(const MultiPoly& p, int n) {
    if (n < 1) throw std::invalid_argument("leading_coeff_sum: n must be positive");
    if (p.degree() > n) throw std::invalid_argument("leading_coeff_sum: polynomial degree exceeds n");
    double acc = 0.0;
    for (const auto& [m, c] : p.terms())
        if (m.degree() == n) acc += c;
    return acc;
}

/// p(x + s*1): substitute x_i -> x_i + s in every variable.
inline MultiPoly shift_along_ones(const MultiPoly& p, double s) {
    const int d = p.dimension();
    if (s == 0.0) return p;
    MultiPoly out(d);
    for (const auto& [m, c] : p.terms()) {
        MultiPoly term = MultiPoly::constant(d, c);
        for (int i = 0; i < d; ++i) {
            MultiPoly lin = MultiPoly::variable(d, i);
            lin.add_term(Monomial(std::vector<int>(static_cast<std::size_t>(d), 0)), s);
            for (int e = 0; e < m.exponents[static_cast<std::size_t>(i)]; ++e) term = term * lin;
        }
        out += term;
    }
    return out;
}

}  // namespace diagcheb
