// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "diagcheb/polycore.hpp"
#include "diagcheb/sdpsolve.hpp"
#include "diagcheb/sets.hpp"

namespace diagcheb {

/// Affine target with unknown weight vector: x -> constant + v_sign * <v', x>.
struct TargetForm {
    double constant = 0.0;
    double v_sign = 0.0;  // +1, -1, or 0 for a constant target
};

struct GramBlock {
    int constraint_index = 0;  // 0 = sigma_0 (multiplier of g_0 = 1)
    std::vector<Monomial> basis;
};

/// Truncated-quadratic-module membership encoding at level k: one Gram block
/// per retained multiplier; the coefficient-matching equalities are generated
/// at assembly time from the blocks and the target.
struct QuadraticModuleEncoding {
    int level = 0;
    int dim = 0;
    TargetForm target;
    std::vector<GramBlock> blocks;
    std::vector<int> dropped;  // constraint indices j with k < deg g_j
};

namespace detail {

inline std::vector<Monomial> monomials_up_to(int d, int max_deg) {
    std::vector<Monomial> out;
    std::vector<int> cur(static_cast<std::size_t>(d), 0);
    // odometer enumeration, then canonical graded-lex sort
    const std::function<void(int, int)> rec = [&](int pos, int used) {
        if (pos == d - 1) {
            for (int e = 0; e <= max_deg - used; ++e) {
                cur[static_cast<std::size_t>(pos)] = e;
                out.emplace_back(cur);
            }
            return;
        }
        for (int e = 0; e <= max_deg - used; ++e) {
            cur[static_cast<std::size_t>(pos)] = e;
            rec(pos + 1, used + e);
        }
    };
    rec(0, 0);
    std::sort(out.begin(), out.end(), GradedLexLess{});
    return out;
}

inline std::optional<Monomial> monomial_minus(const Monomial& a, const Monomial& b) {
    std::vector<int> e(a.exponents.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = a.exponents[i] - b.exponents[i];
        if (e[i] < 0) return std::nullopt;
    }
    return Monomial(std::move(e));
}

inline Monomial monomial_plus(const Monomial& a, const Monomial& b) {
    std::vector<int> e(a.exponents.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = a.exponents[i] + b.exponents[i];
    return Monomial(std::move(e));
}

}  // namespace detail

/// Level-k membership encoding of the target in the truncated quadratic module
/// of g. Multipliers whose degree budget is negative are dropped and recorded.
inline QuadraticModuleEncoding encode_membership(const TargetForm& target,
                                                 std::span<const MultiPoly> g, int k, int d) {
    if (k < 2 || k % 2 != 0) throw std::invalid_argument("encode_membership: k must be even and >= 2");
    if (d < 1) throw std::invalid_argument("encode_membership: dimension must be positive");
    for (const MultiPoly& gj : g)
        if (gj.dimension() != d) throw std::invalid_argument("encode_membership: mixed dimensions");

    QuadraticModuleEncoding enc;
    enc.level = k;
    enc.dim = d;
    enc.target = target;
    enc.blocks.push_back({0, detail::monomials_up_to(d, k / 2)});
    for (std::size_t j = 0; j < g.size(); ++j) {
        const int budget = (k - g[j].degree()) / 2;
        if (k - g[j].degree() < 0) {
            enc.dropped.push_back(static_cast<int>(j) + 1);
            continue;
        }
        enc.blocks.push_back({static_cast<int>(j) + 1, detail::monomials_up_to(d, budget)});
    }
    return enc;
}

struct DetectionAssembly {
    SDPProblem problem;
    int blocks_lower = 0;  // blocks of the lower-bound encoding come first
};

namespace detail {

// Scatter one encoding's coefficient-matching equalities into the SDP. Block
// ids are offset by `block_base`; rows keyed by monomial are created on demand.
inline void scatter_encoding(const QuadraticModuleEncoding& enc, std::span<const MultiPoly> g,
                             int block_base, int d,
                             std::map<Monomial, SDPConstraint, GradedLexLess>& rows) {
    const MultiPoly one = MultiPoly::constant(d, 1.0);
    for (std::size_t bl = 0; bl < enc.blocks.size(); ++bl) {
        const GramBlock& gb = enc.blocks[bl];
        const MultiPoly& mult =
            gb.constraint_index == 0 ? one : g[static_cast<std::size_t>(gb.constraint_index - 1)];
        const auto& basis = gb.basis;
        for (std::size_t p = 0; p < basis.size(); ++p) {
            for (std::size_t q = p; q < basis.size(); ++q) {
                const Monomial pq = monomial_plus(basis[p], basis[q]);
                for (const auto& [delta, coef] : mult.terms()) {
                    const Monomial mu = monomial_plus(pq, delta);
                    rows[mu].entries.push_back({block_base + static_cast<int>(bl),
                                                static_cast<int>(p), static_cast<int>(q), coef});
                }
            }
        }
    }
    // target side: constant + v_sign * <v', x>
    for (int i = 0; i < d; ++i) {
        std::vector<int> e(static_cast<std::size_t>(d), 0);
        e[static_cast<std::size_t>(i)] = 1;
        rows[Monomial(std::move(e))].free_entries.emplace_back(i, -enc.target.v_sign);
    }
    rows[Monomial(std::vector<int>(static_cast<std::size_t>(d), 0))].rhs = enc.target.constant;
}

inline void append_rows(SDPProblem& prob, std::map<Monomial, SDPConstraint, GradedLexLess>& rows) {
    for (auto& [mu, row] : rows) {
        if (row.entries.empty() && row.free_entries.empty() && row.rhs == 0.0) continue;
        prob.constraints.push_back(std::move(row));
    }
}

}  // namespace detail

/// Both membership encodings (lower and upper affine targets) over a shared
/// unknown v', objective 1 - <v', 1>.
inline DetectionAssembly assemble_detection_sdp(const QuadraticModuleEncoding& enc_lower,
                                                const QuadraticModuleEncoding& enc_upper,
                                                std::span<const MultiPoly> g) {
    const int d = enc_lower.dim;
    DetectionAssembly out;
    out.blocks_lower = static_cast<int>(enc_lower.blocks.size());
    SDPProblem& prob = out.problem;
    prob.num_free = d;
    for (const GramBlock& gb : enc_lower.blocks)
        prob.block_dims.push_back(static_cast<int>(gb.basis.size()));
    for (const GramBlock& gb : enc_upper.blocks)
        prob.block_dims.push_back(static_cast<int>(gb.basis.size()));

    std::map<Monomial, SDPConstraint, GradedLexLess> rows_lower, rows_upper;
    detail::scatter_encoding(enc_lower, g, 0, d, rows_lower);
    detail::scatter_encoding(enc_upper, g, out.blocks_lower, d, rows_upper);
    detail::append_rows(prob, rows_lower);
    detail::append_rows(prob, rows_upper);

    prob.objective.constant = 1.0;
    for (int i = 0; i < d; ++i) prob.objective.free_cost.emplace_back(i, -1.0);
    return out;
}

/// Feasibility SDP for a single membership encoding (no objective); useful for
/// testing explicit decompositions.
inline SDPProblem assemble_membership_sdp(const QuadraticModuleEncoding& enc,
                                          std::span<const MultiPoly> g) {
    SDPProblem prob;
    prob.num_free = enc.dim;
    for (const GramBlock& gb : enc.blocks) prob.block_dims.push_back(static_cast<int>(gb.basis.size()));
    std::map<Monomial, SDPConstraint, GradedLexLess> rows;
    detail::scatter_encoding(enc, g, 0, enc.dim, rows);
    detail::append_rows(prob, rows);
    return prob;
}

struct ResidualReport {
    double max_coeff_deviation = 0.0;
    double min_gram_eigenvalue = 0.0;
    std::optional<CertificateCheck> sampling;
    bool pass = false;
};

namespace detail {

inline MultiPoly gram_to_poly(const Eigen::MatrixXd& G, const std::vector<Monomial>& basis, int d) {
    MultiPoly out(d);
    for (std::size_t p = 0; p < basis.size(); ++p)
        for (std::size_t q = 0; q < basis.size(); ++q)
            out.add_term(monomial_plus(basis[p], basis[q]),
                         G(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)));
    return out;
}

inline Eigen::MatrixXd clip_psd(const Eigen::MatrixXd& G, double* min_eig) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (G + G.transpose()));
    if (min_eig) *min_eig = std::min(*min_eig, eig.eigenvalues().minCoeff());
    Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
    return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace detail

/// Certify a floating SDP solution: clip the Grams to PSD, re-expand
/// sigma_0 + sum sigma_j g_j, and compare coefficients against the target
/// affine form; optionally sample-check the recovered certificate on the set.
inline ResidualReport residual_check(std::span<const double> v_prime, std::span<const MultiPoly> g,
                                     double a, double b, const QuadraticModuleEncoding& enc_lower,
                                     const QuadraticModuleEncoding& enc_upper,
                                     std::span<const Eigen::MatrixXd> grams_lower,
                                     std::span<const Eigen::MatrixXd> grams_upper,
                                     const SetDescription* sample_on = nullptr,
                                     std::size_t samples = 10000, std::uint64_t seed = 20240601) {
    const int d = enc_lower.dim;
    ResidualReport rep;
    rep.min_gram_eigenvalue = std::numeric_limits<double>::infinity();

    const auto check_one = [&](const QuadraticModuleEncoding& enc,
                               std::span<const Eigen::MatrixXd> grams, double constant, double v_sign) {
        if (grams.size() != enc.blocks.size())
            throw std::invalid_argument("residual_check: gram count mismatch");
        MultiPoly acc(d);
        for (std::size_t bl = 0; bl < enc.blocks.size(); ++bl) {
            const Eigen::MatrixXd G = detail::clip_psd(grams[bl], &rep.min_gram_eigenvalue);
            MultiPoly sigma = detail::gram_to_poly(G, enc.blocks[bl].basis, d);
            if (enc.blocks[bl].constraint_index == 0)
                acc += sigma;
            else
                acc += sigma * g[static_cast<std::size_t>(enc.blocks[bl].constraint_index - 1)];
        }
        MultiPoly target = MultiPoly::constant(d, constant);
        for (int i = 0; i < d; ++i) {
            std::vector<int> e(static_cast<std::size_t>(d), 0);
            e[static_cast<std::size_t>(i)] = 1;
            target.add_term(Monomial(std::move(e)), v_sign * v_prime[static_cast<std::size_t>(i)]);
        }
        acc -= target;
        for (const auto& [m, c] : acc.terms())
            rep.max_coeff_deviation = std::max(rep.max_coeff_deviation, std::abs(c));
    };

    check_one(enc_lower, grams_lower, enc_lower.target.constant, enc_lower.target.v_sign);
    check_one(enc_upper, grams_upper, enc_upper.target.constant, enc_upper.target.v_sign);
    if (!std::isfinite(rep.min_gram_eigenvalue)) rep.min_gram_eigenvalue = 0.0;

    rep.pass = rep.max_coeff_deviation <= 1e-6 && rep.min_gram_eigenvalue >= -1e-8;
    if (sample_on) {
        rep.sampling = check_certificate(*sample_on, v_prime, a, b, samples, seed);
        if (rep.sampling->max_violation > 1e-4) rep.pass = false;
    }
    return rep;
}

struct DetectOptions {
    int k_max = 8;
    double zero_threshold = 1e-6;
    double solver_tol = 1e-8;
    long solver_max_iter = 200000;
    bool stop_at_certified = true;
    std::size_t check_samples = 10000;
    std::uint64_t check_seed = 20240601;
};

enum class DetectStatus { certified, inconclusive };

inline const char* to_string(DetectStatus s) {
    return s == DetectStatus::certified ? "certified" : "inconclusive";
}

struct LevelReport {
    int k = 0;
    double rho = std::numeric_limits<double>::quiet_NaN();
    SolveStatus solver_status = SolveStatus::max_iter;
    double coeff_deviation = std::numeric_limits<double>::quiet_NaN();
    double min_gram_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    double check_violation = std::numeric_limits<double>::quiet_NaN();
    bool certified = false;
    long iterations = 0;
};

struct DetectionResult {
    DetectStatus status = DetectStatus::inconclusive;
    int level = 0;
    double rho = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> v_prime;
    std::optional<DDCertificate> certificate;
    std::vector<LevelReport> history;
    QuadraticModuleEncoding enc_lower, enc_upper;       // encodings at `level`
    std::vector<Eigen::MatrixXd> grams_lower, grams_upper;
    std::string detail;
};

/// Hierarchy driver for the membership relaxation: for k = k_start, k+2, ...
/// minimize 1 - <v',1> subject to both affine targets lying in the level-k
/// truncated quadratic module; certify via residual_check when rho reaches the
/// zero threshold. The Archimedean assumption is taken on faith, never tested.
inline DetectionResult detect(std::span<const MultiPoly> g, double a, double b,
                              const DetectOptions& opt = {},
                              const SetDescription* sample_on = nullptr) {
    if (g.empty()) throw std::invalid_argument("detect: no constraints");
    if (!(a <= b)) throw std::invalid_argument("detect: a > b");

    DetectionResult res;
    if (b - a <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)})) {
        res.detail = "degenerate diagonal: relaxation requires a < 0 < b";
        return res;
    }

    // establish a < 0 < b by translating along the all-ones direction
    double shift = 0.0;
    std::vector<MultiPoly> shifted;
    if (!(a < 0.0 && 0.0 < b)) {
        shift = 0.5 * (a + b);
        for (const MultiPoly& gj : g) shifted.push_back(shift_along_ones(gj, shift));
    } else {
        shifted.assign(g.begin(), g.end());
    }
    const double at = a - shift;
    const double bt = b - shift;

    int max_deg = 0;
    for (const MultiPoly& gj : shifted) max_deg = std::max(max_deg, gj.degree());
    int k_start = std::max(2, max_deg + (max_deg % 2));

    const int dim = g[0].dimension();
    for (int k = k_start; k <= opt.k_max; k += 2) {
        LevelReport lev;
        lev.k = k;
        QuadraticModuleEncoding enc_lower = encode_membership({-at, +1.0}, shifted, k, dim);
        QuadraticModuleEncoding enc_upper = encode_membership({bt, -1.0}, shifted, k, dim);
        DetectionAssembly asmb = assemble_detection_sdp(enc_lower, enc_upper, shifted);

        SDPSolution sol;
        try {
            sol = solve(asmb.problem, opt.solver_tol, opt.solver_max_iter);
        } catch (const std::exception& e) {
            res.detail += std::string("level ") + std::to_string(k) + ": solver error: " + e.what() + "; ";
            res.history.push_back(lev);
            continue;
        }
        lev.rho = sol.objective;
        lev.solver_status = sol.status;
        lev.iterations = sol.iterations;

        std::vector<Eigen::MatrixXd> grams_lower(sol.blocks.begin(),
                                                 sol.blocks.begin() + asmb.blocks_lower);
        std::vector<Eigen::MatrixXd> grams_upper(sol.blocks.begin() + asmb.blocks_lower,
                                                 sol.blocks.end());

        const bool keep = res.status != DetectStatus::certified;
        if (keep) {
            res.level = k;
            res.rho = sol.objective;
            res.v_prime = sol.free_vars;
            res.enc_lower = enc_lower;
            res.enc_upper = enc_upper;
            res.grams_lower = grams_lower;
            res.grams_upper = grams_upper;
        }

        if (sol.status == SolveStatus::optimal && sol.objective <= opt.zero_threshold) {
            ResidualReport rr =
                residual_check(sol.free_vars, shifted, a, b, enc_lower, enc_upper, grams_lower,
                               grams_upper, sample_on, opt.check_samples, opt.check_seed);
            // sampling, if any, runs against the original (untranslated) set
            lev.coeff_deviation = rr.max_coeff_deviation;
            lev.min_gram_eigenvalue = rr.min_gram_eigenvalue;
            if (rr.sampling) lev.check_violation = rr.sampling->max_violation;
            if (rr.pass) {
                lev.certified = true;
                res.status = DetectStatus::certified;
                res.level = k;
                res.rho = sol.objective;
                res.v_prime = sol.free_vars;
                res.enc_lower = std::move(enc_lower);
                res.enc_upper = std::move(enc_upper);
                res.grams_lower = std::move(grams_lower);
                res.grams_upper = std::move(grams_upper);
                double sum = 0.0;
                for (double v : res.v_prime) sum += v;
                std::vector<double> vnorm = res.v_prime;
                for (double& v : vnorm) v /= sum;
                res.certificate =
                    DDCertificate{std::move(vnorm), a, b, DDCertificate::Sdp{k, sol.objective}};
                res.history.push_back(lev);
                if (opt.stop_at_certified) break;
                continue;
            }
        }
        res.history.push_back(lev);
    }

    // the relaxation values should be non-increasing in k, up to solver noise
    for (std::size_t i = 1; i < res.history.size(); ++i) {
        const double prev = res.history[i - 1].rho, cur = res.history[i].rho;
        if (std::isfinite(prev) && std::isfinite(cur) && cur > prev + 2.0 * opt.solver_tol) {
            res.detail += "rho sequence not non-increasing at level " +
                          std::to_string(res.history[i].k) + "; ";
        }
    }
    if (res.status != DetectStatus::certified && res.detail.empty())
        res.detail = "levels exhausted without certification";
    return res;
}

}  // namespace diagcheb
