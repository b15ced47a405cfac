// Linear Poisson sub-problem solvers: a symmetric banded LDL^T factorization
// for moderate systems and (projected) conjugate gradient above that. The
// assembled system is (vol*A + shift*diag(q)) u = diag(q) f, symmetric
// positive definite for Dirichlet, semidefinite with kernel = constants for
// Neumann at shift 0. Neumann right-hand sides are projected to weighted
// mean zero and solutions returned mean-zero.
#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "semilin/operators.hpp"

namespace semilin {

enum class SolveMethod { direct_cholesky_like, conjugate_gradient };

inline const char* solve_method_name(SolveMethod m) {
    return m == SolveMethod::direct_cholesky_like ? "direct_cholesky_like" : "conjugate_gradient";
}

struct LinearSolveStats {
    int iterations = 0;  // 0 for direct
    double residual_norm = 0.0;
    SolveMethod method = SolveMethod::direct_cholesky_like;
    double neumann_projection = 0.0;  // |weighted mean| removed from the rhs
};

namespace detail {

// Symmetric banded LDL^T. The strictly-lower band is stored row-wise
// (entry (i, j), i-b <= j < i, at lower[i*b + (j - i + b)]) with the
// diagonal in its own contiguous array, and the backward substitution runs
// column-oriented over L's rows, so every inner loop streams memory.
class BandedLdlt {
  public:
    BandedLdlt() = default;

    void factor(int n, int b, RVec lower, RVec diag) {
        n_ = n;
        b_ = b;
        l_ = std::move(lower);
        d_ = std::move(diag);
        for (int i = 0; i < n_; ++i) {
            const int k0 = std::max(0, i - b_);
            const double* li = l_.data() + static_cast<size_t>(i) * b_;
            for (int j = k0; j < i; ++j) {
                double s = l_at(i, j);
                const double* lj = l_.data() + static_cast<size_t>(j) * b_;
                for (int k = k0; k < j; ++k)
                    s -= li[k - i + b_] * d_[static_cast<size_t>(k)] * lj[k - j + b_];
                l_[static_cast<size_t>(i) * b_ + (j - i + b_)] = s / d_[static_cast<size_t>(j)];
            }
            double s = d_[static_cast<size_t>(i)];
            for (int k = k0; k < i; ++k) {
                const double lik = li[k - i + b_];
                s -= lik * d_[static_cast<size_t>(k)] * lik;
            }
            if (!(s > 0.0))
                throw NumericalError("banded LDL^T: non-positive pivot, matrix not positive definite");
            d_[static_cast<size_t>(i)] = s;
        }
    }

    void solve_inplace(RVec& x) const {
        for (int i = 0; i < n_; ++i) {
            double s = x[static_cast<size_t>(i)];
            const double* li = l_.data() + static_cast<size_t>(i) * b_;
            for (int k = std::max(0, i - b_); k < i; ++k) s -= li[k - i + b_] * x[static_cast<size_t>(k)];
            x[static_cast<size_t>(i)] = s;
        }
        for (int i = 0; i < n_; ++i) x[static_cast<size_t>(i)] /= d_[static_cast<size_t>(i)];
        for (int j = n_ - 1; j >= 0; --j) {
            const double xj = x[static_cast<size_t>(j)];
            const double* lj = l_.data() + static_cast<size_t>(j) * b_;
            for (int k = std::max(0, j - b_); k < j; ++k)
                x[static_cast<size_t>(k)] -= lj[k - j + b_] * xj;
        }
    }

    int size() const { return n_; }

  private:
    double l_at(int i, int j) const { return l_[static_cast<size_t>(i) * b_ + (j - i + b_)]; }
    int n_ = 0, b_ = 0;
    RVec l_;  // strictly-lower band, row-wise
    RVec d_;  // diagonal, then the pivots after factorization
};

inline double dot(const RVec& a, const RVec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
inline double nrm2(const RVec& a) { return std::sqrt(dot(a, a)); }

// Plain CG on the assembled system; proj is applied to iterates and
// residuals every step (identity for Dirichlet, weighted mean removal for
// Neumann so singular consistent systems stay in the mean-zero complement).
template <class MatVec, class Proj>
inline int conjugate_gradient(MatVec&& apply, RVec& x, const RVec& b, double tol, int max_iters,
                              Proj&& proj, double& out_rel_residual) {
    const size_t n = b.size();
    RVec r = b, z(n), p(n);
    const double bnorm = nrm2(b);
    if (bnorm == 0.0) {
        x.assign(n, 0.0);
        out_rel_residual = 0.0;
        return 0;
    }
    x.assign(n, 0.0);
    proj(r);
    p = r;
    double rho = dot(r, r);
    int it = 0;
    while (std::sqrt(rho) > tol * bnorm && it < max_iters) {
        apply(p, z);
        proj(z);
        const double pz = dot(p, z);
        if (!(pz > 0.0)) throw NumericalError("conjugate gradient: breakdown (operator not positive on subspace)");
        const double alpha = rho / pz;
        for (size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (size_t i = 0; i < n; ++i) r[i] -= alpha * z[i];
        proj(r);
        const double rho2 = dot(r, r);
        const double beta = rho2 / rho;
        rho = rho2;
        for (size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        ++it;
    }
    out_rel_residual = std::sqrt(rho) / bnorm;
    if (out_rel_residual > tol)
        throw NumericalError("conjugate gradient: tolerance not reached within iteration cap");
    return it;
}

}  // namespace detail

// Prepared solver for one DiscreteOperator; the factorization is immutable
// after construction and reusable across Picard steps and concurrent solves.
class PoissonSolver {
  public:
    explicit PoissonSolver(const DiscreteOperator& op, double tol = 1e-12)
        : op_(&op), tol_(tol) {
        const int n = op.n;
        const int bw = op.A.bandwidth();
        const bool singular = op.bc == BcKind::neumann && op.shift == 0.0;
        direct_ = n <= 100000 && bw <= 256;
        if (direct_) {
            const int nf = singular ? n - 1 : n;  // pin the last unknown of the singular system
            RVec lower(static_cast<size_t>(nf) * bw, 0.0);
            RVec diag(static_cast<size_t>(nf), 0.0);
            for (int i = 0; i < nf; ++i) {
                for (int k = op.A.row_ptr[static_cast<size_t>(i)]; k < op.A.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
                    const int j = op.A.col[static_cast<size_t>(k)];
                    const double v = op.vol * op.A.val[static_cast<size_t>(k)];
                    if (j == i)
                        diag[static_cast<size_t>(i)] += v;
                    else if (j < i && j >= i - bw)
                        lower[static_cast<size_t>(i) * bw + (j - i + bw)] += v;
                }
                diag[static_cast<size_t>(i)] += op.shift * op.mass[static_cast<size_t>(i)];
            }
            ldlt_.factor(nf, bw, std::move(lower), std::move(diag));
        }
    }

    const DiscreteOperator& op() const { return *op_; }
    SolveMethod method() const {
        return direct_ ? SolveMethod::direct_cholesky_like : SolveMethod::conjugate_gradient;
    }

    // Solve (-Delta_g + shift) u = f with the operator's boundary condition.
    // boundary_data, when given, supplies Dirichlet values at chart boundary
    // nodes (parallel to chart->boundary_nodes) inserted through the
    // boundary-face couplings.
    std::pair<CVec, LinearSolveStats> solve(const CVec& f, const CVec* boundary_data = nullptr) const {
        const DiscreteOperator& op = *op_;
        const size_t n = static_cast<size_t>(op.n);
        if (f.size() != n) throw ConfigError("solve: rhs size mismatch");
        RVec re(n), im(n);
        for (size_t i = 0; i < n; ++i) {
            const cplx b = op.mass[i] * f[i];
            re[i] = b.real();
            im[i] = b.imag();
        }
        if (boundary_data != nullptr) {
            if (op.bc != BcKind::dirichlet_data)
                throw ConfigError("solve: boundary data requires a dirichlet_data operator");
            const auto& bn = op.chart->boundary_nodes;
            for (const auto& bl : op.blinks) {
                const auto it = std::lower_bound(bn.begin(), bn.end(), bl.bnode);
                const cplx g = (*boundary_data)[static_cast<size_t>(it - bn.begin())];
                re[static_cast<size_t>(bl.row)] += op.vol * bl.coeff * g.real();
                im[static_cast<size_t>(bl.row)] += op.vol * bl.coeff * g.imag();
            }
        }

        LinearSolveStats stats;
        stats.method = method();
        if (op.bc == BcKind::neumann) {
            const cplx mean = remove_assembled_mean(re, im);
            stats.neumann_projection = std::abs(mean);
        }

        RVec xre = solve_real(re, stats);
        RVec xim = solve_real(im, stats);
        CVec u(n);
        for (size_t i = 0; i < n; ++i) u[i] = cplx(xre[i], xim[i]);
        if (op.bc == BcKind::neumann) remove_weighted_mean(u);
        return {std::move(u), stats};
    }

    // Assembled-system solve K x = b for real b (used by the eigensolver);
    // for singular Neumann systems b must already be orthogonal to constants.
    RVec solve_assembled(const RVec& b) const {
        LinearSolveStats scratch;
        scratch.method = method();
        RVec x = solve_real(b, scratch);
        if (op_->bc == BcKind::neumann && op_->shift == 0.0) {
            CVec tmp(x.size());
            for (size_t i = 0; i < x.size(); ++i) tmp[i] = x[i];
            remove_weighted_mean(tmp);
            for (size_t i = 0; i < x.size(); ++i) x[i] = tmp[i].real();
        }
        return x;
    }

    void remove_weighted_mean(CVec& u) const {
        cplx s{};
        double w = 0.0;
        for (size_t i = 0; i < u.size(); ++i) {
            s += op_->mass[i] * u[i];
            w += op_->mass[i];
        }
        const cplx m = s / w;
        for (auto& ui : u) ui -= m;
    }

  private:
    // Remove the kernel component from the assembled rhs (K's kernel is the
    // constant vector; assembled orthogonality is sum_i b_i = 0). Returns the
    // weighted mean of f that was projected out.
    cplx remove_assembled_mean(RVec& re, RVec& im) const {
        double sre = 0.0, sim = 0.0, w = 0.0;
        for (size_t i = 0; i < re.size(); ++i) {
            sre += re[i];
            sim += im[i];
            w += op_->mass[i];
        }
        const double mre = sre / w, mim = sim / w;
        for (size_t i = 0; i < re.size(); ++i) {
            re[i] -= op_->mass[i] * mre;
            im[i] -= op_->mass[i] * mim;
        }
        return {mre, mim};
    }

    RVec solve_real(const RVec& b, LinearSolveStats& stats) const {
        const DiscreteOperator& op = *op_;
        const size_t n = static_cast<size_t>(op.n);
        RVec x(n, 0.0);
        if (direct_) {
            if (ldlt_.size() == op.n) {
                x = b;
                ldlt_.solve_inplace(x);
            } else {
                // pinned singular Neumann solve: drop the last unknown
                RVec xr(b.begin(), b.end() - 1);
                ldlt_.solve_inplace(xr);
                std::copy(xr.begin(), xr.end(), x.begin());
                x[n - 1] = 0.0;
            }
        } else {
            auto apply = [&](const RVec& p, RVec& out) {
                out.assign(n, 0.0);
                for (int i = 0; i < op.A.n; ++i) {
                    double acc = 0.0;
                    for (int k = op.A.row_ptr[static_cast<size_t>(i)];
                         k < op.A.row_ptr[static_cast<size_t>(i) + 1]; ++k)
                        acc += op.A.val[static_cast<size_t>(k)] * p[static_cast<size_t>(op.A.col[static_cast<size_t>(k)])];
                    out[static_cast<size_t>(i)] = op.vol * acc + op.shift * op.mass[static_cast<size_t>(i)] * p[static_cast<size_t>(i)];
                }
            };
            const bool project = op.bc == BcKind::neumann && op.shift == 0.0;
            auto proj = [&](RVec& v) {
                if (!project) return;
                double s = 0.0, w = 0.0;
                for (size_t i = 0; i < v.size(); ++i) {
                    s += v[i];
                    w += 1.0;
                }
                const double m = s / w;
                for (auto& vi : v) vi -= m;
            };
            double rel = 0.0;
            stats.iterations += detail::conjugate_gradient(apply, x, b, tol_, 10 * op.n + 1000, proj, rel);
        }
        // residual of the assembled system
        RVec kx(n, 0.0);
        for (int i = 0; i < op.A.n; ++i) {
            double acc = 0.0;
            for (int k = op.A.row_ptr[static_cast<size_t>(i)]; k < op.A.row_ptr[static_cast<size_t>(i) + 1]; ++k)
                acc += op.A.val[static_cast<size_t>(k)] * x[static_cast<size_t>(op.A.col[static_cast<size_t>(k)])];
            kx[static_cast<size_t>(i)] = op.vol * acc + op.shift * op.mass[static_cast<size_t>(i)] * x[static_cast<size_t>(i)] - b[static_cast<size_t>(i)];
        }
        const double bn = detail::nrm2(b);
        const double rel = bn > 0.0 ? detail::nrm2(kx) / bn : detail::nrm2(kx);
        stats.residual_norm = std::max(stats.residual_norm, rel);
        return x;
    }

    const DiscreteOperator* op_;
    double tol_;
    bool direct_ = false;
    detail::BandedLdlt ldlt_;
};

// One-shot solve of (-Delta_g + shift) u = rhs. Neumann right-hand sides are
// projected to weighted mean zero internally; the returned field is tagged
// mean_zero. Dirichlet data is taken from rhs.bc_data when present.
inline std::pair<Field, LinearSolveStats> solve_linear(const DiscreteOperator& op, const Field& rhs,
                                                       double tol = 1e-12) {
    if (rhs.chart != op.chart) throw ConfigError("solve_linear: chart mismatch");
    PoissonSolver solver(op, tol);
    const CVec* bdata = (op.bc == BcKind::dirichlet_data && !rhs.bc_data.empty()) ? &rhs.bc_data : nullptr;
    auto [u, stats] = solver.solve(rhs.values, bdata);
    Field out = make_field(*op.chart, op.bc);
    out.values = std::move(u);
    if (op.bc == BcKind::dirichlet_data && bdata != nullptr) out.bc_data = rhs.bc_data;
    out.mean_zero = op.bc == BcKind::neumann;
    return {std::move(out), stats};
}

}  // namespace semilin
