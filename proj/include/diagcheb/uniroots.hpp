// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "diagcheb/polycore.hpp"

namespace diagcheb {

/// Raised when Sturm sign evaluation is too ambiguous to trust the root count
/// (near-multiple roots at the working precision).
class IllConditionedError : public std::runtime_error {
public:
    explicit IllConditionedError(const std::string& what) : std::runtime_error(what) {}
};

/// One interval of the real line; infinite endpoints are open by convention.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = true;
    bool hi_closed = true;

    static Interval closed(double a, double b) { return {a, b, true, true}; }

    static Interval all() {
        return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                false, false};
    }

    bool lo_infinite() const { return std::isinf(lo); }
    bool hi_infinite() const { return std::isinf(hi); }
    bool bounded() const { return !lo_infinite() && !hi_infinite(); }
    bool degenerate() const { return lo == hi; }
};

/// Sorted union of disjoint intervals; touching pieces are merged on construction.
class IntervalSet {
public:
    IntervalSet() = default;

    explicit IntervalSet(std::vector<Interval> parts, double merge_tol = 0.0) {
        for (const Interval& iv : parts) {
            if (!(iv.lo <= iv.hi)) throw std::invalid_argument("IntervalSet: interval with lo > hi");
        }
        std::sort(parts.begin(), parts.end(),
                  [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        for (Interval iv : parts) {
            if (!intervals_.empty()) {
                Interval& last = intervals_.back();
                const bool touching =
                    iv.lo <= last.hi + merge_tol &&
                    (iv.lo < last.hi || iv.lo_closed || last.hi_closed || merge_tol > 0.0);
                if (touching) {
                    if (iv.hi > last.hi || (iv.hi == last.hi && iv.hi_closed)) {
                        last.hi = std::max(last.hi, iv.hi);
                        last.hi_closed = iv.hi >= last.hi ? iv.hi_closed : last.hi_closed;
                    }
                    continue;
                }
            }
            intervals_.push_back(iv);
        }
    }

    static IntervalSet empty() { return IntervalSet(); }
    static IntervalSet all() { return IntervalSet({Interval::all()}); }

    bool is_empty() const { return intervals_.empty(); }
    std::size_t size() const { return intervals_.size(); }
    const std::vector<Interval>& intervals() const { return intervals_; }

    bool contains(double t) const {
        for (const Interval& iv : intervals_) {
            const bool above = t > iv.lo || (t == iv.lo && iv.lo_closed);
            const bool below = t < iv.hi || (t == iv.hi && iv.hi_closed);
            if (above && below) return true;
        }
        return false;
    }

    IntervalSet intersect(const IntervalSet& o) const {
        std::vector<Interval> out;
        for (const Interval& a : intervals_) {
            for (const Interval& b : o.intervals_) {
                double lo = std::max(a.lo, b.lo);
                double hi = std::min(a.hi, b.hi);
                if (lo > hi) continue;
                bool lc = (lo == a.lo && !a.lo_closed) || (lo == b.lo && !b.lo_closed) ? false : true;
                bool hc = (hi == a.hi && !a.hi_closed) || (hi == b.hi && !b.hi_closed) ? false : true;
                if (lo == hi && !(lc && hc)) continue;
                out.push_back({lo, hi, lc, hc});
            }
        }
        return IntervalSet(std::move(out));
    }

    /// Re-normalize with a tolerance, gluing intervals whose gap is at most tol.
    IntervalSet merged(double tol) const { return IntervalSet(intervals_, tol); }

private:
    std::vector<Interval> intervals_;
};

inline IntervalSet intersect_all(std::span<const IntervalSet> sets) {
    if (sets.empty()) throw std::invalid_argument("intersect_all: empty list");
    IntervalSet acc = sets[0];
    for (std::size_t i = 1; i < sets.size(); ++i) acc = acc.intersect(sets[i]);
    return acc;
}

namespace detail {

// Sign with a guard band: values below the threshold count as zero.
inline int guarded_sign(double v, double threshold) {
    if (std::abs(v) <= threshold) return 0;
    return v > 0.0 ? 1 : -1;
}

inline double coeff_norm1(const UniPoly& p) {
    double s = 0.0;
    for (double c : p.coeffs()) s += std::abs(c);
    return s;
}

// Remainder of num / den over doubles. Coefficients are zeroed only at the
// rounding-noise floor of the division, so a genuinely tiny (near-multiple
// root) remainder survives into the chain instead of being swallowed.
inline UniPoly poly_remainder(const UniPoly& num, const UniPoly& den) {
    const int dd = den.degree();
    const double lead = den[dd];
    const double eps = 64.0 * std::numeric_limits<double>::epsilon() *
                       std::max(coeff_norm1(num), coeff_norm1(den));
    std::vector<double> n(num.coeffs());
    while (static_cast<int>(n.size()) - 1 >= dd && !n.empty()) {
        const double q = n.back() / lead;
        const int shift = static_cast<int>(n.size()) - 1 - dd;
        for (int i = 0; i <= dd; ++i) n[static_cast<std::size_t>(shift + i)] -= q * den[i];
        n.pop_back();
        while (!n.empty() && std::abs(n.back()) <= eps * std::max(1.0, std::abs(q))) n.pop_back();
    }
    return UniPoly(std::move(n));
}

struct SturmChain {
    std::vector<UniPoly> seq;
    std::vector<double> guards;  // per-polynomial sign guard thresholds

    bool head_ambiguous(double t) const { return guarded_sign(seq[0].eval(t), guards[0]) == 0; }

    // Number of sign variations at t. Guarded zeros of intermediate members
    // are skipped (exact for true zeros); an ambiguous head makes the count
    // unusable and must be avoided by the caller.
    int variations(double t) const {
        int count = 0;
        int prev = 0;
        for (std::size_t i = 0; i < seq.size(); ++i) {
            const int s = guarded_sign(seq[i].eval(t), guards[i]);
            if (s == 0) continue;
            if (prev != 0 && s != prev) ++count;
            prev = s;
        }
        return count;
    }
};

inline SturmChain sturm_chain(const UniPoly& p) {
    SturmChain chain;
    chain.seq.push_back(p);
    UniPoly d = p.derivative();
    if (!d.is_zero()) chain.seq.push_back(d);
    while (chain.seq.size() >= 2) {
        const UniPoly& a = chain.seq[chain.seq.size() - 2];
        const UniPoly& b = chain.seq.back();
        if (b.degree() == 0) break;
        UniPoly r = poly_remainder(a, b);
        if (r.is_zero()) break;  // nontrivial gcd: the chain still counts distinct roots
        r *= -1.0;
        chain.seq.push_back(std::move(r));
    }
    for (const UniPoly& q : chain.seq) chain.guards.push_back(1e-12 * coeff_norm1(q));
    return chain;
}

// Evaluation point near `want` inside (lo, hi) where the head polynomial has
// an unambiguous sign; near-multiple clusters leave no such point.
inline double sharp_point(const SturmChain& chain, double lo, double hi, double want) {
    if (!chain.head_ambiguous(want)) return want;
    const double span = hi - lo;
    for (int k = 1; k <= 12; ++k) {
        const double step = span * static_cast<double>(k) / 32.0;
        for (double t : {want + step, want - step}) {
            if (t <= lo || t >= hi) continue;
            if (!chain.head_ambiguous(t)) return t;
        }
    }
    throw IllConditionedError("Sturm sign evaluation ambiguous over a whole neighborhood");
}

inline double cauchy_root_bound(const UniPoly& p) {
    const int n = p.degree();
    const double lead = std::abs(p[n]);
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(p[i]));
    return 1.0 + m / lead;
}

// A few Newton steps to sharpen a bisection root; stays inside [lo, hi].
inline double newton_polish(const UniPoly& p, const UniPoly& dp, double x, double lo, double hi) {
    for (int it = 0; it < 4; ++it) {
        const double d = dp.eval(x);
        if (std::abs(d) < 1e-300) break;
        const double step = p.eval(x) / d;
        const double next = x - step;
        if (!(next >= lo && next <= hi)) break;
        x = next;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
            break;
    }
    return x;
}

}  // namespace detail

/// All distinct real roots of p, ascending, each within tol of a true root.
/// Sturm bisection, then refinement; multiplicities are not reported.
inline std::vector<double> isolate_real_roots(const UniPoly& p_in, double tol = 1e-10) {
    if (p_in.is_zero()) throw std::invalid_argument("isolate_real_roots: zero polynomial");
    if (!(tol > 0.0)) throw std::invalid_argument("isolate_real_roots: tol must be positive");

    // Scale to unit max coefficient; roots are unchanged.
    double maxc = 0.0;
    for (double c : p_in.coeffs()) maxc = std::max(maxc, std::abs(c));
    UniPoly p = p_in * (1.0 / maxc);
    p = p.trimmed(1e-14);
    if (p.is_zero()) throw std::invalid_argument("isolate_real_roots: zero polynomial");
    if (p.degree() == 0) return {};

    const auto chain = detail::sturm_chain(p);
    double bound = detail::cauchy_root_bound(p) * (1.0 + 1e-9) + 1e-9;

    const auto count_in = [&](double lo, double hi) { return chain.variations(lo) - chain.variations(hi); };

    struct Seg {
        double lo, hi;
        int count;
    };
    std::vector<Seg> pending;
    std::vector<Seg> isolated;
    {
        const int total = count_in(-bound, bound);
        if (total < 0) throw IllConditionedError("isolate_real_roots: inconsistent global count");
        if (total > 0) pending.push_back({-bound, bound, total});
    }

    while (!pending.empty()) {
        Seg seg = pending.back();
        pending.pop_back();
        if (seg.count == 1) {
            isolated.push_back(seg);
            continue;
        }
        if (seg.hi - seg.lo < std::max(tol, 1e-13 * std::max({1.0, std::abs(seg.lo), std::abs(seg.hi)}))) {
            throw IllConditionedError(
                "isolate_real_roots: cluster of roots unresolved at working precision");
        }
        const double mid = detail::sharp_point(chain, seg.lo, seg.hi, 0.5 * (seg.lo + seg.hi));
        const int left = count_in(seg.lo, mid);
        const int right = count_in(mid, seg.hi);
        if (left < 0 || right < 0 || left + right != seg.count)
            throw IllConditionedError("isolate_real_roots: ambiguous Sturm counts");
        if (left > 0) pending.push_back({seg.lo, mid, left});
        if (right > 0) pending.push_back({mid, seg.hi, right});
    }

    const UniPoly dp = p.derivative();
    std::vector<double> roots;
    roots.reserve(isolated.size());
    for (const Seg& seg : isolated) {
        double lo = seg.lo, hi = seg.hi;
        const double flo = p.eval(lo);
        const double fhi = p.eval(hi);
        if (flo == 0.0) {
            roots.push_back(lo);
            continue;
        }
        if (flo * fhi < 0.0) {
            // simple sign change: plain bisection, then a Newton polish
            double slo = flo;
            while (hi - lo > 0.25 * tol) {
                const double mid = 0.5 * (lo + hi);
                const double fm = p.eval(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (slo * fm < 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    slo = fm;
                }
            }
            const double x = detail::newton_polish(p, dp, 0.5 * (lo + hi), seg.lo, seg.hi);
            roots.push_back(x);
            continue;
        } else {
            // Even multiplicity: p never changes sign, but the chain's last
            // member (the gcd surrogate) carries the root with odd
            // multiplicity, so bisect on that instead.
            const UniPoly& glast = chain.seq.back();
            double glo = glast.eval(lo);
            if (glo * glast.eval(hi) >= 0.0)
                throw IllConditionedError(
                    "isolate_real_roots: cannot refine a root without a sign change");
            while (hi - lo > 0.25 * tol) {
                const double mid = 0.5 * (lo + hi);
                const double gm = glast.eval(mid);
                if (gm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (glo * gm < 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
            }
            roots.push_back(
                detail::newton_polish(glast, glast.derivative(), 0.5 * (lo + hi), seg.lo, seg.hi));
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

/// {t : p(t) >= 0} with endpoints at the roots of p. Isolated zeros of a
/// locally negative p appear as degenerate single-point intervals.
inline IntervalSet nonneg_set(const UniPoly& p, double tol = 1e-10) {
    if (p.is_zero()) throw std::invalid_argument("nonneg_set: zero polynomial");
    const std::vector<double> roots = isolate_real_roots(p, tol);
    const double inf = std::numeric_limits<double>::infinity();

    if (roots.empty()) return p.eval(0.0) > 0.0 ? IntervalSet::all() : IntervalSet::empty();

    // Sample one point inside each maximal root-free segment.
    std::vector<double> probes;
    probes.push_back(roots.front() - 1.0 - std::abs(roots.front()));
    for (std::size_t i = 0; i + 1 < roots.size(); ++i) probes.push_back(0.5 * (roots[i] + roots[i + 1]));
    probes.push_back(roots.back() + 1.0 + std::abs(roots.back()));

    std::vector<bool> positive(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) positive[i] = p.eval(probes[i]) > 0.0;

    std::vector<Interval> parts;
    if (positive.front()) parts.push_back({-inf, roots.front(), false, true});
    for (std::size_t i = 0; i + 1 < roots.size(); ++i)
        if (positive[i + 1]) parts.push_back(Interval::closed(roots[i], roots[i + 1]));
    if (positive.back()) parts.push_back({roots.back(), inf, true, false});
    // Roots themselves always satisfy p >= 0.
    for (double r : roots) parts.push_back(Interval::closed(r, r));
    return IntervalSet(std::move(parts));
}

enum class DiagonalStatus { ok, empty, multiple_components, unbounded, ill_conditioned };

struct DiagonalResult {
    DiagonalStatus status = DiagonalStatus::ok;
    Interval interval{};
    std::string detail;

    bool ok() const { return status == DiagonalStatus::ok; }
};

inline const char* to_string(DiagonalStatus s) {
    switch (s) {
        case DiagonalStatus::ok: return "ok";
        case DiagonalStatus::empty: return "empty";
        case DiagonalStatus::multiple_components: return "multiple_components";
        case DiagonalStatus::unbounded: return "unbounded";
        case DiagonalStatus::ill_conditioned: return "ill_conditioned";
    }
    return "?";
}

/// Diagonal {t : g_j(t*1) >= 0 for all j} of a semi-algebraic set. Succeeds
/// only when the intersection is exactly one bounded interval.
inline DiagonalResult compute_diagonal(std::span<const MultiPoly> constraints, double tol = 1e-10) {
    if (constraints.empty()) throw std::invalid_argument("compute_diagonal: no constraints");
    const int d = constraints[0].dimension();
    for (const MultiPoly& g : constraints)
        if (g.dimension() != d) throw std::invalid_argument("compute_diagonal: mixed dimensions");

    std::vector<IntervalSet> sets;
    try {
        for (const MultiPoly& g : constraints) {
            const UniPoly pj = restrict_to_diagonal(g).trimmed(kCoeffPruneTol);
            if (pj.is_zero()) continue;  // constraint vanishes on the diagonal: contributes all of R
            sets.push_back(nonneg_set(pj, tol));
        }
    } catch (const IllConditionedError& e) {
        return {DiagonalStatus::ill_conditioned, {}, e.what()};
    }
    if (sets.empty())
        return {DiagonalStatus::unbounded, {}, "all constraints vanish on the diagonal"};

    const IntervalSet isect = intersect_all(std::span<const IntervalSet>(sets)).merged(tol);
    if (isect.is_empty()) return {DiagonalStatus::empty, {}, "diagonal intersection is empty"};
    if (isect.size() > 1) {
        return {DiagonalStatus::multiple_components, {},
                std::to_string(isect.size()) + " components in the diagonal intersection"};
    }
    const Interval iv = isect.intervals().front();
    if (!iv.bounded()) {
        std::string which = iv.lo_infinite() && iv.hi_infinite() ? "two unbounded ends"
                            : iv.lo_infinite()                   ? "unbounded below"
                                                                 : "unbounded above";
        return {DiagonalStatus::unbounded, iv, which};
    }
    return {DiagonalStatus::ok, iv, ""};
}

}  // namespace diagcheb
