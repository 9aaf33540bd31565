// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "diagcheb/polycore.hpp"

namespace diagcheb {

struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    int dimension() const { return static_cast<int>(lo.size()); }
};

/// Ball {||x||_p <= r}; p = inf is the box [-r, r]^d.
struct PNormBall {
    double p = 2.0;
    double radius = 1.0;
    int dim = 1;
};

/// Unit ball of the ordered weighted l1 norm; weights nonincreasing, nonnegative.
struct OwlBall {
    std::vector<double> weights;
};

/// {0 <= x_1 <= x_2 <= ... <= x_d <= 1}.
struct SimplexOrdered {
    int dim = 1;
};

/// {x >= 0, sum x_i <= 1}.
struct SimplexStandard {
    int dim = 1;
};

struct Segment {
    std::vector<double> a;
    std::vector<double> b;
};

/// {x : g_j(x) >= 0 for all j}. A bounding box is required for sampling.
struct SemiAlgebraic {
    std::vector<MultiPoly> constraints;
    std::optional<Box> bbox;
};

class SetDescription;

/// inner + shift * 1.
struct Translated {
    double shift = 0.0;
    std::shared_ptr<const SetDescription> inner;
};

using SetVariant =
    std::variant<PNormBall, OwlBall, SimplexOrdered, SimplexStandard, Segment, SemiAlgebraic, Translated>;

class SetDescription {
public:
    SetDescription(SetVariant v) : value_(std::move(v)) { validate(); }

    const SetVariant& value() const { return value_; }

    template <class T>
    const T* get_if() const {
        return std::get_if<T>(&value_);
    }

    int dimension() const;
    std::string kind() const;

private:
    void validate() const;
    SetVariant value_;
};

inline int SetDescription::dimension() const {
    struct V {
        int operator()(const PNormBall& s) const { return s.dim; }
        int operator()(const OwlBall& s) const { return static_cast<int>(s.weights.size()); }
        int operator()(const SimplexOrdered& s) const { return s.dim; }
        int operator()(const SimplexStandard& s) const { return s.dim; }
        int operator()(const Segment& s) const { return static_cast<int>(s.a.size()); }
        int operator()(const SemiAlgebraic& s) const {
            return s.constraints.empty() ? 0 : s.constraints.front().dimension();
        }
        int operator()(const Translated& s) const { return s.inner->dimension(); }
    };
    return std::visit(V{}, value_);
}

inline std::string SetDescription::kind() const {
    struct V {
        std::string operator()(const PNormBall&) const { return "pnorm_ball"; }
        std::string operator()(const OwlBall&) const { return "owl_ball"; }
        std::string operator()(const SimplexOrdered&) const { return "simplex_ordered"; }
        std::string operator()(const SimplexStandard&) const { return "simplex_standard"; }
        std::string operator()(const Segment&) const { return "segment"; }
        std::string operator()(const SemiAlgebraic&) const { return "semialgebraic"; }
        std::string operator()(const Translated&) const { return "translated"; }
    };
    return std::visit(V{}, value_);
}

inline void SetDescription::validate() const {
    if (const auto* b = std::get_if<PNormBall>(&value_)) {
        if (b->dim < 1) throw std::invalid_argument("pnorm_ball: dim must be positive");
        if (!(b->radius > 0.0)) throw std::invalid_argument("pnorm_ball: radius must be positive");
        if (!(b->p >= 1.0)) throw std::invalid_argument("pnorm_ball: p must be in [1, inf]");
    } else if (const auto* o = std::get_if<OwlBall>(&value_)) {
        if (o->weights.empty()) throw std::invalid_argument("owl_ball: empty weights");
        for (std::size_t i = 0; i < o->weights.size(); ++i) {
            if (o->weights[i] < 0.0) throw std::invalid_argument("owl_ball: negative weight");
            if (i > 0 && o->weights[i] > o->weights[i - 1] + 1e-15)
                throw std::invalid_argument("owl_ball: weights must be nonincreasing");
        }
        if (!(o->weights.front() > 0.0)) throw std::invalid_argument("owl_ball: w1 must be positive");
    } else if (const auto* s = std::get_if<SimplexOrdered>(&value_)) {
        if (s->dim < 1) throw std::invalid_argument("simplex_ordered: dim must be positive");
    } else if (const auto* s2 = std::get_if<SimplexStandard>(&value_)) {
        if (s2->dim < 1) throw std::invalid_argument("simplex_standard: dim must be positive");
    } else if (const auto* seg = std::get_if<Segment>(&value_)) {
        if (seg->a.size() != seg->b.size() || seg->a.empty())
            throw std::invalid_argument("segment: endpoint dimension mismatch");
        if (seg->a == seg->b) throw std::invalid_argument("segment: endpoints coincide");
    } else if (const auto* sa = std::get_if<SemiAlgebraic>(&value_)) {
        if (sa->constraints.empty()) throw std::invalid_argument("semialgebraic: no constraints");
        const int d = sa->constraints.front().dimension();
        for (const MultiPoly& g : sa->constraints)
            if (g.dimension() != d) throw std::invalid_argument("semialgebraic: mixed dimensions");
        if (sa->bbox) {
            if (sa->bbox->dimension() != d || sa->bbox->hi.size() != sa->bbox->lo.size())
                throw std::invalid_argument("semialgebraic: bbox dimension mismatch");
            for (int i = 0; i < d; ++i)
                if (!(sa->bbox->lo[static_cast<std::size_t>(i)] <= sa->bbox->hi[static_cast<std::size_t>(i)]))
                    throw std::invalid_argument("semialgebraic: bbox lo > hi");
        }
    } else if (const auto* t = std::get_if<Translated>(&value_)) {
        if (!t->inner) throw std::invalid_argument("translated: missing inner set");
    }
}

/// Witness of the diagonally-determined property: <v,1> = 1 and <v,x> in [a,b] on the set.
struct DDCertificate {
    std::vector<double> v;
    double a = 0.0;
    double b = 0.0;

    struct Analytic {};
    struct Sdp {
        int level = 0;
        double rho = 0.0;
    };
    struct User {};
    using Provenance = std::variant<Analytic, Sdp, User>;
    Provenance provenance = Analytic{};

    int dimension() const { return static_cast<int>(v.size()); }

    double sum_v() const {
        double s = 0.0;
        for (double w : v) s += w;
        return s;
    }

    bool is_valid(double tol = 1e-9) const { return std::abs(sum_v() - 1.0) <= tol && a <= b; }

    void require_valid(double tol = 1e-9) const {
        if (std::abs(sum_v() - 1.0) > tol)
            throw std::invalid_argument("DDCertificate: <v,1> != 1");
        if (!(a <= b)) throw std::invalid_argument("DDCertificate: a > b");
    }

    std::string provenance_name() const {
        if (std::holds_alternative<Analytic>(provenance)) return "analytic";
        if (std::holds_alternative<Sdp>(provenance)) return "sdp";
        return "user";
    }
};

/// True when every entry of v is nonnegative (up to 1e-12 slack).
inline bool entrywise_nonneg(const DDCertificate& c) {
    for (double w : c.v)
        if (w < -1e-12) return false;
    return true;
}

namespace detail {

inline double pnorm(std::span<const double> x, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : x) m = std::max(m, std::abs(v));
        return m;
    }
    double s = 0.0;
    for (double v : x) s += std::pow(std::abs(v), p);
    return std::pow(s, 1.0 / p);
}

inline double owl_norm(std::span<const double> x, std::span<const double> w) {
    std::vector<double> a(x.begin(), x.end());
    for (double& v : a) v = std::abs(v);
    std::sort(a.begin(), a.end(), std::greater<>());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i];
    return s;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Least-norm v in span{1, u} with <v,1> = 1 and <v,u> = 0; empty when u || 1.
inline std::optional<std::vector<double>> transversal_weight(std::span<const double> u) {
    const std::size_t d = u.size();
    double su = 0.0, uu = 0.0;
    for (double w : u) {
        su += w;
        uu += w * w;
    }
    const double dd = static_cast<double>(d);
    const double det = dd * uu - su * su;  // Gram determinant of {1, u}
    if (det <= 1e-12 * dd * uu) return std::nullopt;
    const double x = uu / det;
    const double y = -su / det;
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = x + y * u[i];
    return v;
}

}  // namespace detail

/// Membership test with tolerance, used to spot-check diagonal points.
inline bool set_contains(const SetDescription& s, std::span<const double> x, double tol = 1e-9) {
    if (static_cast<int>(x.size()) != s.dimension())
        throw std::invalid_argument("set_contains: point dimension mismatch");
    if (const auto* b = s.get_if<PNormBall>()) return detail::pnorm(x, b->p) <= b->radius + tol;
    if (const auto* o = s.get_if<OwlBall>()) return detail::owl_norm(x, o->weights) <= 1.0 + tol;
    if (const auto* so = s.get_if<SimplexOrdered>()) {
        double prev = 0.0;
        for (int i = 0; i < so->dim; ++i) {
            if (x[static_cast<std::size_t>(i)] < prev - tol) return false;
            prev = std::max(prev, x[static_cast<std::size_t>(i)]);
        }
        return prev <= 1.0 + tol;
    }
    if (const auto* ss = s.get_if<SimplexStandard>()) {
        double sum = 0.0;
        for (int i = 0; i < ss->dim; ++i) {
            if (x[static_cast<std::size_t>(i)] < -tol) return false;
            sum += x[static_cast<std::size_t>(i)];
        }
        return sum <= 1.0 + tol;
    }
    if (const auto* seg = s.get_if<Segment>()) {
        // distance from x to the segment a + s(b-a), s in [0,1]
        const std::size_t d = seg->a.size();
        std::vector<double> u(d);
        double uu = 0.0, ux = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            u[i] = seg->b[i] - seg->a[i];
            uu += u[i] * u[i];
            ux += u[i] * (x[i] - seg->a[i]);
        }
        const double t = std::clamp(ux / uu, 0.0, 1.0);
        double dist2 = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double r = x[i] - seg->a[i] - t * u[i];
            dist2 += r * r;
        }
        return std::sqrt(dist2) <= tol;
    }
    if (const auto* sa = s.get_if<SemiAlgebraic>()) {
        for (const MultiPoly& g : sa->constraints)
            if (eval_multi(g, x) < -tol) return false;
        return true;
    }
    if (const auto* tr = s.get_if<Translated>()) {
        std::vector<double> y(x.begin(), x.end());
        for (double& v : y) v -= tr->shift;
        return set_contains(*tr->inner, y, tol);
    }
    throw std::logic_error("set_contains: unhandled kind");
}

/// Coordinate bounding box; for semi-algebraic sets this is the user-supplied box.
inline Box bounding_box(const SetDescription& s) {
    const int d = s.dimension();
    if (const auto* b = s.get_if<PNormBall>())
        return {std::vector<double>(static_cast<std::size_t>(d), -b->radius),
                std::vector<double>(static_cast<std::size_t>(d), b->radius)};
    if (const auto* o = s.get_if<OwlBall>()) {
        const double r = 1.0 / o->weights.front();
        return {std::vector<double>(static_cast<std::size_t>(d), -r),
                std::vector<double>(static_cast<std::size_t>(d), r)};
    }
    if (s.get_if<SimplexOrdered>() || s.get_if<SimplexStandard>())
        return {std::vector<double>(static_cast<std::size_t>(d), 0.0),
                std::vector<double>(static_cast<std::size_t>(d), 1.0)};
    if (const auto* seg = s.get_if<Segment>()) {
        Box box{seg->a, seg->a};
        for (int i = 0; i < d; ++i) {
            box.lo[static_cast<std::size_t>(i)] =
                std::min(seg->a[static_cast<std::size_t>(i)], seg->b[static_cast<std::size_t>(i)]);
            box.hi[static_cast<std::size_t>(i)] =
                std::max(seg->a[static_cast<std::size_t>(i)], seg->b[static_cast<std::size_t>(i)]);
        }
        return box;
    }
    if (const auto* sa = s.get_if<SemiAlgebraic>()) {
        if (!sa->bbox)
            throw std::invalid_argument("bounding_box: semialgebraic set requires a user-supplied bbox");
        return *sa->bbox;
    }
    if (const auto* tr = s.get_if<Translated>()) {
        Box box = bounding_box(*tr->inner);
        for (double& v : box.lo) v += tr->shift;
        for (double& v : box.hi) v += tr->shift;
        return box;
    }
    throw std::logic_error("bounding_box: unhandled kind");
}

/// Draw `count` points of the set. Balls and simplices use exact
/// parameterizations; semi-algebraic sets use rejection inside their bbox.
inline std::vector<std::vector<double>> sample_set(const SetDescription& s, std::size_t count,
                                                   std::uint64_t seed) {
    const int d = s.dimension();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> out;
    out.reserve(count);

    if (const auto* b = s.get_if<PNormBall>()) {
        if (std::isinf(b->p)) {
            for (std::size_t k = 0; k < count; ++k) {
                std::vector<double> x(static_cast<std::size_t>(d));
                for (double& v : x) v = b->radius * (2.0 * unit(rng) - 1.0);
                out.push_back(std::move(x));
            }
            return out;
        }
        // Uniform in the p-ball: signed Gamma(1/p)^(1/p) coordinates scaled by
        // (sum + Exp(1))^(-1/p).
        std::gamma_distribution<double> gamma_p(1.0 / b->p, 1.0);
        std::exponential_distribution<double> expo(1.0);
        for (std::size_t k = 0; k < count; ++k) {
            std::vector<double> x(static_cast<std::size_t>(d));
            double sum = 0.0;
            for (double& v : x) {
                const double g = gamma_p(rng);
                sum += g;
                const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
                v = sign * std::pow(g, 1.0 / b->p);
            }
            const double scale = b->radius / std::pow(sum + expo(rng), 1.0 / b->p);
            for (double& v : x) v *= scale;
            out.push_back(std::move(x));
        }
        return out;
    }
    if (const auto* o = s.get_if<OwlBall>()) {
        const double r = 1.0 / o->weights.front();
        const std::size_t max_attempts = count * 10000 + 1000;
        std::size_t attempts = 0;
        while (out.size() < count) {
            if (++attempts > max_attempts)
                throw std::runtime_error("sample_set: owl ball rejection sampling stalled");
            std::vector<double> x(static_cast<std::size_t>(d));
            for (double& v : x) v = r * (2.0 * unit(rng) - 1.0);
            if (detail::owl_norm(x, o->weights) <= 1.0) out.push_back(std::move(x));
        }
        return out;
    }
    if (s.get_if<SimplexOrdered>()) {
        for (std::size_t k = 0; k < count; ++k) {
            std::vector<double> x(static_cast<std::size_t>(d));
            for (double& v : x) v = unit(rng);
            std::sort(x.begin(), x.end());
            out.push_back(std::move(x));
        }
        return out;
    }
    if (s.get_if<SimplexStandard>()) {
        std::exponential_distribution<double> expo(1.0);
        for (std::size_t k = 0; k < count; ++k) {
            std::vector<double> x(static_cast<std::size_t>(d));
            double sum = expo(rng);
            for (double& v : x) {
                v = expo(rng);
                sum += v;
            }
            for (double& v : x) v /= sum;
            out.push_back(std::move(x));
        }
        return out;
    }
    if (const auto* seg = s.get_if<Segment>()) {
        for (std::size_t k = 0; k < count; ++k) {
            const double t = unit(rng);
            std::vector<double> x(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i)
                x[static_cast<std::size_t>(i)] =
                    seg->a[static_cast<std::size_t>(i)] +
                    t * (seg->b[static_cast<std::size_t>(i)] - seg->a[static_cast<std::size_t>(i)]);
            out.push_back(std::move(x));
        }
        return out;
    }
    if (const auto* sa = s.get_if<SemiAlgebraic>()) {
        if (!sa->bbox)
            throw std::invalid_argument("sample_set: semialgebraic set requires a user-supplied bbox");
        const Box& box = *sa->bbox;
        std::vector<PolyEvaluator> evals;
        evals.reserve(sa->constraints.size());
        for (const MultiPoly& g : sa->constraints) evals.emplace_back(g);
        const std::size_t max_attempts = count * 10000 + 1000;
        std::size_t attempts = 0;
        while (out.size() < count) {
            if (++attempts > max_attempts)
                throw std::runtime_error("sample_set: rejection sampling stalled (bbox too loose?)");
            std::vector<double> x(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i)
                x[static_cast<std::size_t>(i)] =
                    box.lo[static_cast<std::size_t>(i)] +
                    unit(rng) * (box.hi[static_cast<std::size_t>(i)] - box.lo[static_cast<std::size_t>(i)]);
            bool inside = true;
            for (const PolyEvaluator& g : evals)
                if (g(x) < 0.0) {
                    inside = false;
                    break;
                }
            if (inside) out.push_back(std::move(x));
        }
        return out;
    }
    if (const auto* tr = s.get_if<Translated>()) {
        out = sample_set(*tr->inner, count, seed);
        for (auto& x : out)
            for (double& v : x) v += tr->shift;
        return out;
    }
    throw std::logic_error("sample_set: unhandled kind");
}

/// Closed-form certificates for the analytically understood families.
/// Returns nullopt for semi-algebraic sets and for segments that neither lie
/// on the diagonal line nor cross it transversally.
inline std::optional<DDCertificate> certify_analytic(const SetDescription& s) {
    const int d = s.dimension();
    const auto ones_over_d = [&] {
        return std::vector<double>(static_cast<std::size_t>(d), 1.0 / static_cast<double>(d));
    };

    if (const auto* b = s.get_if<PNormBall>()) {
        // ||1||_p = d^(1/p); the vector dual to 1 collapses to 1/d by symmetry.
        const double norm_ones = std::isinf(b->p) ? 1.0 : std::pow(static_cast<double>(d), 1.0 / b->p);
        const double bb = b->radius / norm_ones;
        return DDCertificate{ones_over_d(), -bb, bb, DDCertificate::Analytic{}};
    }
    if (const auto* o = s.get_if<OwlBall>()) {
        double W = 0.0;
        for (double w : o->weights) W += w;
        std::vector<double> v(o->weights);
        for (double& w : v) w /= W;
        return DDCertificate{std::move(v), -1.0 / W, 1.0 / W, DDCertificate::Analytic{}};
    }
    if (s.get_if<SimplexOrdered>()) {
        std::vector<double> v(static_cast<std::size_t>(d), 0.0);
        v[0] = 1.0;
        return DDCertificate{std::move(v), 0.0, 1.0, DDCertificate::Analytic{}};
    }
    if (s.get_if<SimplexStandard>()) {
        return DDCertificate{ones_over_d(), 0.0, 1.0 / static_cast<double>(d), DDCertificate::Analytic{}};
    }
    if (const auto* seg = s.get_if<Segment>()) {
        const std::size_t n = seg->a.size();
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = seg->b[i] - seg->a[i];
        auto v = detail::transversal_weight(u);
        if (!v) {
            // direction parallel to 1: diagonally-determined only if the whole
            // segment lies on the diagonal line
            double dev = 0.0;
            for (std::size_t i = 0; i < n; ++i) dev = std::max(dev, std::abs(seg->a[i] - seg->a[0]));
            if (dev > 1e-12) return std::nullopt;
            const double ta = seg->a[0], tb = seg->b[0];
            return DDCertificate{std::vector<double>(n, 1.0 / static_cast<double>(n)),
                                 std::min(ta, tb), std::max(ta, tb), DDCertificate::Analytic{}};
        }
        // transversal segment: the diagonal meets it in at most one point t0*1
        double uu = 0.0, u1 = 0.0, ua = 0.0, a1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            uu += u[i] * u[i];
            u1 += u[i];
            ua += u[i] * seg->a[i];
            a1 += seg->a[i];
        }
        // least squares for (t, s) in t*1 - s*u = a
        const double dd = static_cast<double>(n);
        const double det = dd * uu - u1 * u1;
        const double t0 = (uu * a1 - u1 * ua) / det;
        const double s0 = (u1 * a1 - dd * ua) / det;
        double resid = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = t0 - s0 * u[i] - seg->a[i];
            resid = std::max(resid, std::abs(r));
        }
        const double scale = std::max({1.0, std::abs(t0), std::sqrt(uu)});
        if (resid > 1e-9 * scale) return std::nullopt;          // diagonal misses the segment line
        if (s0 < -1e-12 || s0 > 1.0 + 1e-12) return std::nullopt;  // crossing outside the segment
        return DDCertificate{std::move(*v), t0, t0, DDCertificate::Analytic{}};
    }
    if (const auto* tr = s.get_if<Translated>()) {
        auto inner = certify_analytic(*tr->inner);
        if (!inner) return std::nullopt;
        inner->a += tr->shift;
        inner->b += tr->shift;
        return inner;
    }
    return std::nullopt;  // semialgebraic: route through detection
}

struct CertificateCheck {
    double max_violation = 0.0;  // max over samples of max(a - <v,x>, <v,x> - b)
    double sum_v = 0.0;
    bool diag_points_in_set = true;
};

/// Sample-based check that <v,x> stays inside [a,b] on the set, plus a
/// membership spot-check of the diagonal points a*1, midpoint, b*1.
inline CertificateCheck check_certificate(const SetDescription& s, std::span<const double> v, double a,
                                          double b, std::size_t samples, std::uint64_t seed) {
    if (static_cast<int>(v.size()) != s.dimension())
        throw std::invalid_argument("check_certificate: dimension mismatch");
    if (samples < 1) throw std::invalid_argument("check_certificate: samples must be >= 1");
    CertificateCheck report;
    for (double w : v) report.sum_v += w;

    const auto pts = sample_set(s, samples, seed);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& x : pts) {
        const double t = detail::dot(v, x);
        worst = std::max(worst, std::max(a - t, t - b));
    }
    report.max_violation = worst;

    for (double t : {a, 0.5 * (a + b), b}) {
        std::vector<double> x(v.size(), t);
        if (!set_contains(s, x, 1e-7)) report.diag_points_in_set = false;
    }
    return report;
}

inline CertificateCheck check_certificate(const SetDescription& s, const DDCertificate& c,
                                          std::size_t samples, std::uint64_t seed) {
    return check_certificate(s, c.v, c.a, c.b, samples, seed);
}

}  // namespace diagcheb
