// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "diagcheb/polycore.hpp"
#include "diagcheb/sets.hpp"
#include "diagcheb/signature.hpp"

namespace diagcheb {

struct RemezResult {
    double value = 0.0;       // equioscillation magnitude
    UniPoly approximant;      // best q in Pi_{n-1}; t^n - q(t) attains `value`
    std::vector<double> reference;
    int iterations = 0;
};

namespace detail {

// local maximizer of f on [lo, hi] by golden-section
template <class F>
double golden_max(F&& f, double lo, double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 60 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Best uniform approximation of t^n from Pi_{n-1} on [a,b] by the exchange
/// algorithm, working in the Chebyshev basis of the interval. The reference
/// holds the n+1 alternation points of the levelled error.
inline RemezResult remez_monic(int n, double a, double b, int max_iters = 50,
                               bool chebyshev_init = true) {
    if (n < 1) throw std::invalid_argument("remez_monic: n must be positive");
    if (!(a < b)) throw std::invalid_argument("remez_monic: requires a < b");

    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const auto to_unit = [&](double t) { return (t - mid) / half; };

    // mapped Chebyshev basis values via the recurrence
    const auto cheb_vals = [&](double t, std::span<double> out) {
        const double s = to_unit(t);
        double tkm1 = 1.0, tk = s;
        for (std::size_t k = 0; k < out.size(); ++k) {
            if (k == 0)
                out[k] = 1.0;
            else if (k == 1)
                out[k] = s;
            else {
                const double next = 2.0 * s * tk - tkm1;
                tkm1 = tk;
                tk = next;
                out[k] = next;
            }
        }
    };

    std::vector<double> ref(static_cast<std::size_t>(n) + 1);
    if (chebyshev_init) {
        for (int j = 0; j <= n; ++j)
            ref[static_cast<std::size_t>(j)] =
                mid + half * std::cos(static_cast<double>(n - j) * std::numbers::pi / n);
    } else {
        for (int j = 0; j <= n; ++j)
            ref[static_cast<std::size_t>(j)] = a + (b - a) * static_cast<double>(j) / n;
    }

    Eigen::VectorXd coef(n);  // Chebyshev-basis coefficients of the approximant
    double level = 0.0;
    const auto err = [&](double t) {
        std::vector<double> tv(static_cast<std::size_t>(n));
        cheb_vals(t, tv);
        double p = 0.0;
        for (int k = 0; k < n; ++k) p += coef[k] * tv[static_cast<std::size_t>(k)];
        return std::pow(t, n) - p;
    };

    int it = 0;
    for (it = 1; it <= max_iters; ++it) {
        // levelled interpolation on the reference
        Eigen::MatrixXd M(n + 1, n + 1);
        Eigen::VectorXd rhs(n + 1);
        std::vector<double> tv(static_cast<std::size_t>(n));
        for (int i = 0; i <= n; ++i) {
            cheb_vals(ref[static_cast<std::size_t>(i)], tv);
            for (int k = 0; k < n; ++k) M(i, k) = tv[static_cast<std::size_t>(k)];
            M(i, n) = i % 2 == 0 ? 1.0 : -1.0;
            rhs[i] = std::pow(ref[static_cast<std::size_t>(i)], n);
        }
        Eigen::VectorXd sol = M.colPivHouseholderQr().solve(rhs);
        coef = sol.head(n);
        level = std::abs(sol[n]);

        // locate the alternation extrema of the current error
        const int grid = std::max(2000, 200 * n);
        std::vector<double> cand;
        std::vector<double> cand_val;
        const double e0 = err(a);
        double run_best_t = a, run_best_v = std::abs(e0);
        int run_sign = e0 >= 0.0 ? 1 : -1;
        for (int i = 1; i <= grid; ++i) {
            const double t = a + (b - a) * static_cast<double>(i) / grid;
            const double e = err(t);
            const int s = e >= 0.0 ? 1 : -1;
            if (s != run_sign) {
                cand.push_back(run_best_t);
                cand_val.push_back(run_best_v);
                run_sign = s;
                run_best_t = t;
                run_best_v = std::abs(e);
            } else if (std::abs(e) > run_best_v) {
                run_best_v = std::abs(e);
                run_best_t = t;
            }
        }
        cand.push_back(run_best_t);
        cand_val.push_back(run_best_v);

        // refine each candidate within its grid neighborhood
        const double step = (b - a) / grid;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            const double lo = std::max(a, cand[i] - step);
            const double hi = std::min(b, cand[i] + step);
            const double sgn = err(cand[i]) >= 0.0 ? 1.0 : -1.0;
            cand[i] = detail::golden_max([&](double t) { return sgn * err(t); }, lo, hi);
            cand_val[i] = std::abs(err(cand[i]));
        }

        if (static_cast<int>(cand.size()) < n + 1)
            throw std::runtime_error("remez_monic: reference degenerated during exchange");
        // trim to n+1 alternating points, keeping the global maximum
        while (static_cast<int>(cand.size()) > n + 1) {
            if (cand_val.front() <= cand_val.back()) {
                cand.erase(cand.begin());
                cand_val.erase(cand_val.begin());
            } else {
                cand.pop_back();
                cand_val.pop_back();
            }
        }

        double emax = 0.0;
        for (double v : cand_val) emax = std::max(emax, v);
        ref.assign(cand.begin(), cand.end());
        if (emax - level <= 1e-13 * std::max(1.0, level)) break;
        if (it == max_iters)
            throw std::runtime_error("remez_monic: exchange failed to settle within iteration budget");
    }

    // assemble the approximant in the monomial basis
    UniPoly q;
    for (int k = 0; k < n; ++k) {
        const UniPoly tk = compose_scalar_affine(chebyshev_coeffs(k), 1.0 / half, -mid / half);
        q += tk * coef[k];
    }
    return {level, q.trimmed(1e-14), ref, it};
}

struct SupNormEstimate {
    double max_val = 0.0;
    std::vector<double> argmax;
};

/// Lower bound on sup |p| over the set from seeded sampling, augmented with
/// the diagonal Chebyshev extremal points whenever an analytic certificate is
/// available (those attain the sup exactly for the constructed polynomials).
inline SupNormEstimate sup_norm_estimate(const MultiPoly& p, const SetDescription& s,
                                         std::size_t samples, std::uint64_t seed) {
    if (p.dimension() != s.dimension())
        throw std::invalid_argument("sup_norm_estimate: dimension mismatch");
    SupNormEstimate best;
    best.argmax.assign(static_cast<std::size_t>(p.dimension()), 0.0);
    const PolyEvaluator ev(p);

    const auto consider = [&](const std::vector<double>& x) {
        const double v = std::abs(ev(x));
        if (v > best.max_val) {
            best.max_val = v;
            best.argmax = x;
        }
    };

    for (const auto& x : sample_set(s, samples, seed)) consider(x);

    if (auto cert = certify_analytic(s)) {
        const int n = std::max(1, p.degree());
        const Signature sig = build_signature(*cert, n);
        for (const auto& pt : sig.points)
            if (set_contains(s, pt, 1e-7)) consider(pt);
    }
    return best;
}

/// Discretized primal minimax: minimize max |P| over the lattice points of the
/// set subject to the unit leading-coefficient-sum normalization, by Lawson
/// iteration with an equalizing polish. A lower bound on the true least norm
/// up to discretization slack. Deliberately independent of the SDP machinery.
inline double brute_force_least(const SetDescription& s, int n, std::size_t grid) {
    const int d = s.dimension();
    if (d > 2) throw std::invalid_argument("brute_force_least: only d <= 2 supported");
    if (n < 1 || n > 4) throw std::invalid_argument("brute_force_least: only 1 <= n <= 4 supported");
    if (grid < 16) throw std::invalid_argument("brute_force_least: grid too small");

    // discretize
    std::vector<std::vector<double>> pts;
    if (const auto* seg = s.get_if<Segment>()) {
        const std::size_t K = grid;
        for (std::size_t i = 0; i <= K; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(K);
            std::vector<double> x(seg->a.size());
            for (std::size_t j = 0; j < x.size(); ++j)
                x[j] = seg->a[j] + t * (seg->b[j] - seg->a[j]);
            pts.push_back(std::move(x));
        }
    } else {
        const Box box = bounding_box(s);
        if (d == 1) {
            for (std::size_t i = 0; i <= grid; ++i) {
                std::vector<double> x{box.lo[0] +
                                      (box.hi[0] - box.lo[0]) * static_cast<double>(i) / grid};
                if (set_contains(s, x, 1e-12)) pts.push_back(std::move(x));
            }
        } else {
            const std::size_t K = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(grid))));
            for (std::size_t i = 0; i <= K; ++i) {
                for (std::size_t j = 0; j <= K; ++j) {
                    std::vector<double> x{
                        box.lo[0] + (box.hi[0] - box.lo[0]) * static_cast<double>(i) / K,
                        box.lo[1] + (box.hi[1] - box.lo[1]) * static_cast<double>(j) / K};
                    if (set_contains(s, x, 1e-12)) pts.push_back(std::move(x));
                }
            }
        }
    }
    const std::size_t M = pts.size();
    if (M < 8) throw std::runtime_error("brute_force_least: discretization produced too few points");

    // monomial design matrix, graded-lex
    std::vector<Monomial> monos;
    {
        std::vector<int> e;
        for (int total = 0; total <= n; ++total)
            for (int e0 = total; e0 >= 0; --e0) {
                if (d == 1) {
                    if (e0 == total) monos.push_back(Monomial(std::vector<int>{total}));
                } else {
                    monos.push_back(Monomial(std::vector<int>{e0, total - e0}));
                }
            }
        std::sort(monos.begin(), monos.end(), GradedLexLess{});
    }
    const std::size_t D = monos.size();
    std::vector<std::size_t> leading;
    for (std::size_t j = 0; j < D; ++j)
        if (monos[j].degree() == n) leading.push_back(j);
    const std::size_t pivot = leading.back();

    Eigen::MatrixXd Phi(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(D));
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < D; ++j) {
            double v = 1.0;
            for (int kdim = 0; kdim < d; ++kdim)
                for (int e = 0; e < monos[j].exponents[static_cast<std::size_t>(kdim)]; ++e)
                    v *= pts[i][static_cast<std::size_t>(kdim)];
            Phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }

    // eliminate the normalization: a_pivot = 1 - sum of other leading coeffs
    const Eigen::Index Dred = static_cast<Eigen::Index>(D) - 1;
    Eigen::MatrixXd R(static_cast<Eigen::Index>(M), Dred);
    Eigen::VectorXd base = Phi.col(static_cast<Eigen::Index>(pivot));
    {
        Eigen::Index col = 0;
        for (std::size_t j = 0; j < D; ++j) {
            if (j == pivot) continue;
            R.col(col) = Phi.col(static_cast<Eigen::Index>(j));
            if (monos[j].degree() == n) R.col(col) -= base;
            ++col;
        }
    }

    const auto residuals = [&](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
        return base + R * theta;
    };

    // Lawson iteration
    Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(M), 1.0 / static_cast<double>(M));
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(Dred);
    double best = std::numeric_limits<double>::infinity();
    double prev_maxr = std::numeric_limits<double>::infinity();
    int stable = 0;
    for (int iter = 0; iter < 800; ++iter) {
        Eigen::VectorXd sw = w.cwiseSqrt();
        Eigen::MatrixXd Rw = sw.asDiagonal() * R;
        Eigen::VectorXd bw = -(sw.asDiagonal() * base);
        theta = Rw.colPivHouseholderQr().solve(bw);
        Eigen::VectorXd r = residuals(theta);
        const double maxr = r.lpNorm<Eigen::Infinity>();
        best = std::min(best, maxr);
        w = w.cwiseProduct(r.cwiseAbs());
        const double wsum = w.sum();
        if (wsum <= 0.0) break;
        w /= wsum;
        if (std::abs(maxr - prev_maxr) <= 1e-9 * std::max(1e-12, maxr)) {
            if (++stable >= 5) break;
        } else {
            stable = 0;
        }
        prev_maxr = maxr;
    }

    // equalizing polish on the near-active set
    for (int round = 0; round < 6; ++round) {
        Eigen::VectorXd r = residuals(theta);
        const double maxr = r.lpNorm<Eigen::Infinity>();
        best = std::min(best, maxr);
        std::vector<Eigen::Index> active;
        for (Eigen::Index i = 0; i < r.size(); ++i)
            if (std::abs(r[i]) >= 0.995 * maxr) active.push_back(i);
        if (active.size() < static_cast<std::size_t>(Dred) + 1) break;
        Eigen::MatrixXd Ae(static_cast<Eigen::Index>(active.size()), Dred + 1);
        Eigen::VectorXd be(static_cast<Eigen::Index>(active.size()));
        for (std::size_t i = 0; i < active.size(); ++i) {
            const double sgn = r[active[i]] >= 0.0 ? 1.0 : -1.0;
            Ae.block(static_cast<Eigen::Index>(i), 0, 1, Dred) = R.row(active[i]);
            Ae(static_cast<Eigen::Index>(i), Dred) = -sgn;
            be[static_cast<Eigen::Index>(i)] = -base[active[i]];
        }
        Eigen::VectorXd sol = Ae.colPivHouseholderQr().solve(be);
        Eigen::VectorXd theta_new = sol.head(Dred);
        const double maxr_new = residuals(theta_new).lpNorm<Eigen::Infinity>();
        if (maxr_new < maxr) {
            theta = theta_new;
            best = std::min(best, maxr_new);
        } else {
            break;
        }
    }
    return best;
}

}  // namespace diagcheb
