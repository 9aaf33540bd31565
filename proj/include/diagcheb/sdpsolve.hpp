// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace diagcheb {

/// Entry of a symmetric per-block coefficient matrix M (row <= col); the
/// constraint/objective contribution is <M, X> with M[col][row] implied.
struct BlockTriplet {
    int block = 0;
    int row = 0;
    int col = 0;
    double value = 0.0;
};

struct SDPConstraint {
    std::vector<BlockTriplet> entries;
    std::vector<std::pair<int, double>> free_entries;  // (free-variable index, coefficient)
    double rhs = 0.0;
};

struct SDPObjective {
    std::vector<BlockTriplet> block_cost;
    std::vector<std::pair<int, double>> free_cost;
    double constant = 0.0;
};

/// min sum_j <C_j, X_j> + <c, y> + const  s.t.  per-row <A_ij, X_j> + <a_i, y> = b_i,
/// X_j PSD, y free.
struct SDPProblem {
    std::vector<int> block_dims;
    int num_free = 0;
    std::vector<SDPConstraint> constraints;
    SDPObjective objective;
};

enum class SolveStatus { optimal, max_iter, infeasible_suspected };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::infeasible_suspected: return "infeasible_suspected";
    }
    return "?";
}

struct SDPSolution {
    SolveStatus status = SolveStatus::max_iter;
    std::vector<Eigen::MatrixXd> blocks;
    std::vector<double> free_vars;
    double objective = 0.0;
    // all residuals below are recomputed from the returned iterates, not
    // solver-internal estimates
    double primal_residual = 0.0;       // ||A(X, y) - b||_inf
    double dual_residual = 0.0;         // rho * ||z_k - z_{k-1}||_inf at exit
    double min_eigenvalue = 0.0;        // min over blocks of lambda_min(X_j)
    double stationarity_residual = 0.0; // ||c + A^T nu - svec(S)||_inf
    std::vector<double> constraint_duals;
    std::vector<Eigen::MatrixXd> dual_blocks;  // S_j, the dual slack blocks
    long iterations = 0;
};

namespace detail {

inline constexpr double kSqrt2 = 1.4142135623730951;

inline int svec_len(int n) { return n * (n + 1) / 2; }

// upper-triangle (r <= c) position within a block's svec segment
inline int svec_index(int r, int c, int n) {
    // column-major over the upper triangle: (0,0), (0,1), (1,1), (0,2), ...
    (void)n;
    return c * (c + 1) / 2 + r;
}

inline Eigen::MatrixXd smat(const Eigen::VectorXd& v, int n) {
    Eigen::MatrixXd M(n, n);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r <= c; ++r) {
            const double val = v[svec_index(r, c, n)];
            if (r == c)
                M(r, c) = val;
            else {
                M(r, c) = val / kSqrt2;
                M(c, r) = val / kSqrt2;
            }
        }
    return M;
}

inline Eigen::VectorXd svec(const Eigen::MatrixXd& M) {
    const int n = static_cast<int>(M.rows());
    Eigen::VectorXd v(svec_len(n));
    for (int c = 0; c < n; ++c)
        for (int r = 0; r <= c; ++r)
            v[svec_index(r, c, n)] = r == c ? M(r, c) : kSqrt2 * 0.5 * (M(r, c) + M(c, r));
    return v;
}

struct Layout {
    std::vector<int> block_offset;  // svec offset per block
    int free_offset = 0;
    int total = 0;
};

inline Layout make_layout(const SDPProblem& p) {
    Layout lay;
    int off = 0;
    for (int n : p.block_dims) {
        lay.block_offset.push_back(off);
        off += svec_len(n);
    }
    lay.free_offset = off;
    lay.total = off + p.num_free;
    return lay;
}

inline void add_triplet(Eigen::VectorXd& row, const Layout& lay, const SDPProblem& p,
                        const BlockTriplet& t) {
    if (t.block < 0 || t.block >= static_cast<int>(p.block_dims.size()))
        throw std::invalid_argument("sdpsolve: triplet block out of range");
    const int n = p.block_dims[static_cast<std::size_t>(t.block)];
    int r = t.row, c = t.col;
    if (r > c) std::swap(r, c);
    if (c >= n || r < 0) throw std::invalid_argument("sdpsolve: triplet index out of range");
    const int idx = lay.block_offset[static_cast<std::size_t>(t.block)] + svec_index(r, c, n);
    row[idx] += r == c ? t.value : kSqrt2 * t.value;
}

inline Eigen::VectorXd project_cone(const Eigen::VectorXd& v, const SDPProblem& p, const Layout& lay) {
    Eigen::VectorXd out = v;
    for (std::size_t bidx = 0; bidx < p.block_dims.size(); ++bidx) {
        const int n = p.block_dims[bidx];
        const int off = lay.block_offset[bidx];
        Eigen::MatrixXd M = smat(v.segment(off, svec_len(n)), n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
        Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
        Eigen::MatrixXd proj = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
        out.segment(off, svec_len(n)) = svec(proj);
    }
    return out;
}

}  // namespace detail

/// Min-eigenvalue across the PSD blocks of a candidate point.
inline double min_block_eigenvalue(const std::vector<Eigen::MatrixXd>& blocks) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& B : blocks) {
        if (B.rows() == 0) continue;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B);
        m = std::min(m, eig.eigenvalues().minCoeff());
    }
    return std::isfinite(m) ? m : 0.0;
}

/// First-order operator-splitting solve: alternate projection onto the affine
/// constraints (objective folded into the proximal term) and onto the PSD
/// cone, with over-relaxation and residual-balancing penalty updates.
/// Deterministic: fixed zero initialization, no randomization.
inline SDPSolution solve(const SDPProblem& prob, double tol = 1e-8, long max_iter = 200000) {
    int total_psd = 0;
    for (int n : prob.block_dims) {
        if (n < 1) throw std::invalid_argument("sdpsolve: block dimension must be positive");
        total_psd += n;
    }
    if (total_psd > 500) throw std::invalid_argument("sdpsolve: total PSD dimension cap (500) exceeded");
    if (prob.constraints.size() > 5000)
        throw std::invalid_argument("sdpsolve: constraint cap (5000) exceeded");
    if (prob.num_free < 0) throw std::invalid_argument("sdpsolve: negative free-variable count");

    const detail::Layout lay = detail::make_layout(prob);
    const int N = lay.total;
    const int m = static_cast<int>(prob.constraints.size());
    if (N == 0) throw std::invalid_argument("sdpsolve: empty problem");

    // Assemble dense data; rows scaled to unit 2-norm, objective to unit inf-norm.
    Eigen::MatrixXd A(m, N);
    Eigen::VectorXd b(m), row_scale(m);
    A.setZero();
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(N);
        for (const BlockTriplet& t : prob.constraints[static_cast<std::size_t>(i)].entries)
            detail::add_triplet(row, lay, prob, t);
        for (const auto& [j, v] : prob.constraints[static_cast<std::size_t>(i)].free_entries) {
            if (j < 0 || j >= prob.num_free)
                throw std::invalid_argument("sdpsolve: free index out of range");
            row[lay.free_offset + j] += v;
        }
        double s = row.norm();
        if (s < 1e-300) s = 1.0;
        row_scale[i] = s;
        A.row(i) = row / s;
        b[i] = prob.constraints[static_cast<std::size_t>(i)].rhs / s;
    }

    Eigen::VectorXd c = Eigen::VectorXd::Zero(N);
    for (const BlockTriplet& t : prob.objective.block_cost) detail::add_triplet(c, lay, prob, t);
    for (const auto& [j, v] : prob.objective.free_cost) {
        if (j < 0 || j >= prob.num_free) throw std::invalid_argument("sdpsolve: free index out of range");
        c[lay.free_offset + j] += v;
    }
    double obj_scale = std::max(1.0, c.lpNorm<Eigen::Infinity>());
    Eigen::VectorXd c_int = c / obj_scale;

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod, codT;
    if (m > 0) {
        cod.compute(A);
        codT.compute(A.transpose());
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd z_old(N), w(N), xhat(N);

    double rho = 1.0;
    const double alpha = 1.6;
    const int check_every = 25;
    long iter = 0;
    double dual_res = std::numeric_limits<double>::infinity();
    double last_window_best = std::numeric_limits<double>::infinity();
    double window_best = std::numeric_limits<double>::infinity();
    int flat_windows = 0;
    std::vector<double> obj_hist;  // objective at the last few checks
    SolveStatus status = SolveStatus::max_iter;

    const auto primal_residual_orig = [&](const Eigen::VectorXd& pt) {
        if (m == 0) return 0.0;
        Eigen::VectorXd r = A * pt - b;
        double worst = 0.0;
        for (int i = 0; i < m; ++i) worst = std::max(worst, std::abs(r[i]) * row_scale[i]);
        return worst;
    };

    for (iter = 1; iter <= max_iter; ++iter) {
        w = z - u - c_int / rho;
        if (m > 0)
            x = w - cod.solve(A * w - b);
        else
            x = w;
        xhat = alpha * x + (1.0 - alpha) * z;
        z_old = z;
        z = detail::project_cone(xhat + u, prob, lay);
        u += xhat - z;

        if (iter % check_every == 0) {
            if (!z.allFinite() || !u.allFinite())
                throw std::runtime_error("sdpsolve: NaN encountered during iteration");
            const double pr = (x - z).lpNorm<Eigen::Infinity>();
            dual_res = rho * (z - z_old).lpNorm<Eigen::Infinity>();
            const double pz = primal_residual_orig(z);
            window_best = std::min(window_best, pz);
            // stop well inside the residual targets so the objective value is
            // also accurate to ~tol, not just the residuals
            if (pz <= 0.01 * tol && pr <= 0.01 * tol && rho * pr <= 0.1 * tol &&
                dual_res <= 0.01 * tol) {
                status = SolveStatus::optimal;
                break;
            }
            // degenerate optimal faces leave the iterates jittering with a
            // frozen objective; accept once the jitter is residual-small and
            // the objective has been flat for 20 consecutive checks
            const double obj_now = c.dot(z) + prob.objective.constant;
            obj_hist.push_back(obj_now);
            if (obj_hist.size() > 21) obj_hist.erase(obj_hist.begin());
            if (obj_hist.size() == 21 && pz <= 0.3 * tol && pr <= 0.3 * tol && rho * pr <= 3.0 * tol) {
                const auto [mn, mx] = std::minmax_element(obj_hist.begin(), obj_hist.end());
                if (*mx - *mn <= 0.05 * tol * std::max(1.0, std::abs(obj_now))) {
                    status = SolveStatus::optimal;
                    break;
                }
            }
            if (iter % 100 == 0) {
                // residual balancing; u is the scaled dual, so it rescales with rho
                if (pr > 10.0 * dual_res / rho && rho < 1e6) {
                    rho *= 2.0;
                    u *= 0.5;
                } else if (dual_res / rho > 10.0 * pr && rho > 1e-6) {
                    rho *= 0.5;
                    u *= 2.0;
                }
            }
            if (iter % 500 == 0) {
                // full optimality gates on the current iterate: exact
                // stationarity via least squares plus the primal-dual gap,
                // which controls the objective error directly
                if (pz <= 0.2 * tol && pr <= tol) {
                    const Eigen::VectorXd rhs_nu = -(c_int + rho * u);
                    const Eigen::VectorXd nu_try = codT.solve(rhs_nu);
                    const double stat_now =
                        obj_scale * (A.transpose() * nu_try - rhs_nu).lpNorm<Eigen::Infinity>();
                    const double primal_obj = c.dot(z);
                    const double dual_obj = -obj_scale * b.dot(nu_try);
                    const double gap = std::abs(primal_obj - dual_obj);
                    if (stat_now <= 2.0 * tol &&
                        gap <= 0.3 * tol * std::max(1.0, std::abs(primal_obj))) {
                        status = SolveStatus::optimal;
                        break;
                    }
                }
                if (window_best > 0.999 * last_window_best && window_best > 1e3 * tol &&
                    u.lpNorm<Eigen::Infinity>() > 1e5) {
                    if (++flat_windows >= 4) {
                        status = SolveStatus::infeasible_suspected;
                        break;
                    }
                } else {
                    flat_windows = 0;
                }
                last_window_best = window_best;
                window_best = std::numeric_limits<double>::infinity();
            }
        }
    }
    if (iter > max_iter) iter = max_iter;

    SDPSolution sol;
    sol.status = status;
    sol.iterations = iter;
    sol.dual_residual = dual_res;

    for (std::size_t bidx = 0; bidx < prob.block_dims.size(); ++bidx) {
        const int n = prob.block_dims[bidx];
        sol.blocks.push_back(detail::smat(z.segment(lay.block_offset[bidx], detail::svec_len(n)), n));
    }
    sol.free_vars.resize(static_cast<std::size_t>(prob.num_free));
    for (int j = 0; j < prob.num_free; ++j)
        sol.free_vars[static_cast<std::size_t>(j)] = z[lay.free_offset + j];

    sol.objective = c.dot(z) + prob.objective.constant;
    sol.primal_residual = primal_residual_orig(z);
    sol.min_eigenvalue = min_block_eigenvalue(sol.blocks);

    // dual extraction: S = -rho*u (block part), nu from least squares on A^T
    Eigen::VectorXd s_int = -rho * u;
    Eigen::VectorXd nu_orig = Eigen::VectorXd::Zero(m);
    if (m > 0) {
        Eigen::VectorXd rhs_nu = -(c_int + rho * u);
        Eigen::VectorXd nu_int = codT.solve(rhs_nu);
        for (int i = 0; i < m; ++i) nu_orig[i] = obj_scale * nu_int[i] / row_scale[i];
        // stationarity on original data: c + A_orig^T nu - s_orig
        Eigen::VectorXd stat = c + obj_scale * (A.transpose() * nu_int) - obj_scale * s_int;
        sol.stationarity_residual = stat.lpNorm<Eigen::Infinity>();
    } else {
        sol.stationarity_residual = (c - obj_scale * s_int).lpNorm<Eigen::Infinity>();
    }
    sol.constraint_duals.assign(nu_orig.data(), nu_orig.data() + m);
    for (std::size_t bidx = 0; bidx < prob.block_dims.size(); ++bidx) {
        const int n = prob.block_dims[bidx];
        sol.dual_blocks.push_back(
            detail::smat(obj_scale * s_int.segment(lay.block_offset[bidx], detail::svec_len(n)), n));
    }

    const bool gates_pass = sol.primal_residual <= tol && sol.min_eigenvalue >= -tol &&
                            sol.stationarity_residual <= 10.0 * tol;
    if (status == SolveStatus::optimal && !gates_pass)
        sol.status = SolveStatus::max_iter;  // demote: exit test passed but recomputation did not
    if (status == SolveStatus::max_iter && gates_pass)
        sol.status = SolveStatus::optimal;  // iteration cap hit on an already-optimal iterate
    return sol;
}

struct SolutionVerification {
    double primal_residual = 0.0;
    double min_eigenvalue = 0.0;
    double stationarity_residual = 0.0;
};

/// Independent recomputation of the three optimality residuals from problem
/// data and a returned solution.
inline SolutionVerification verify_solution(const SDPProblem& prob, const SDPSolution& sol) {
    const detail::Layout lay = detail::make_layout(prob);
    Eigen::VectorXd zvec(lay.total);
    zvec.setZero();
    for (std::size_t bidx = 0; bidx < prob.block_dims.size(); ++bidx) {
        const int n = prob.block_dims[bidx];
        zvec.segment(lay.block_offset[bidx], detail::svec_len(n)) = detail::svec(sol.blocks[bidx]);
    }
    for (int j = 0; j < prob.num_free; ++j)
        zvec[lay.free_offset + j] = sol.free_vars[static_cast<std::size_t>(j)];

    SolutionVerification rep;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(lay.total);
    for (const BlockTriplet& t : prob.objective.block_cost) detail::add_triplet(c, lay, prob, t);
    for (const auto& [j, v] : prob.objective.free_cost) c[lay.free_offset + j] += v;

    Eigen::VectorXd stat = c;
    for (std::size_t i = 0; i < prob.constraints.size(); ++i) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(lay.total);
        for (const BlockTriplet& t : prob.constraints[i].entries) detail::add_triplet(row, lay, prob, t);
        for (const auto& [j, v] : prob.constraints[i].free_entries) row[lay.free_offset + j] += v;
        rep.primal_residual =
            std::max(rep.primal_residual, std::abs(row.dot(zvec) - prob.constraints[i].rhs));
        stat += sol.constraint_duals[i] * row;
    }
    for (std::size_t bidx = 0; bidx < prob.block_dims.size(); ++bidx) {
        const int n = prob.block_dims[bidx];
        stat.segment(lay.block_offset[bidx], detail::svec_len(n)) -= detail::svec(sol.dual_blocks[bidx]);
    }
    rep.stationarity_residual = stat.lpNorm<Eigen::Infinity>();
    rep.min_eigenvalue = min_block_eigenvalue(sol.blocks);
    return rep;
}

/// Plain-text dump (block sizes, constraint triplets, rhs, objective) for
/// eyeballing and cross-checking with external tools.
inline void dump_problem(const SDPProblem& p, std::ostream& os) {
    os << "blocks";
    for (int n : p.block_dims) os << ' ' << n;
    os << "\nfree " << p.num_free << "\n";
    os << "objective const " << p.objective.constant << "\n";
    for (const BlockTriplet& t : p.objective.block_cost)
        os << "obj B" << t.block << ' ' << t.row << ' ' << t.col << ' ' << t.value << "\n";
    for (const auto& [j, v] : p.objective.free_cost) os << "obj F" << j << ' ' << v << "\n";
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
        os << "con " << i << " rhs " << p.constraints[i].rhs << "\n";
        for (const BlockTriplet& t : p.constraints[i].entries)
            os << "  B" << t.block << ' ' << t.row << ' ' << t.col << ' ' << t.value << "\n";
        for (const auto& [j, v] : p.constraints[i].free_entries) os << "  F" << j << ' ' << v << "\n";
    }
}

}  // namespace diagcheb
