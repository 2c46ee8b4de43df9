#include "piezocell/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace piezocell {

namespace {
using Clock = std::chrono::steady_clock;
double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}
} // namespace

void log_solve(const SolveStats& s, int ndof) {
    std::fprintf(stderr,
                 "{\"event\":\"solve\",\"label\":\"%s\",\"method\":\"%s\","
                 "\"dofs\":%d,\"iterations\":%d,\"rel_residual\":%.3e,"
                 "\"seconds\":%.3f}\n",
                 s.label.c_str(), s.method.c_str(), ndof, s.iterations,
                 s.rel_residual, s.seconds);
}

// ---------------------------------------------------------------------------
// Block SSOR preconditioner

BlockSsorPreconditioner::Block BlockSsorPreconditioner::make_block(
    const CsrMatrix& K, const std::vector<DofKind>& kinds, DofKind kind,
    double sign) {
    Block blk;
    auto ex = extract_kind_block(K, kinds, kind, sign);
    blk.m = std::move(ex.matrix);
    blk.dofs = std::move(ex.dofs);
    blk.diag.resize(blk.dofs.size());
    double dmax = 0.0;
    for (std::size_t r = 0; r < blk.dofs.size(); ++r) {
        blk.diag[r] = blk.m.find(static_cast<int>(r), static_cast<int>(r));
        if (blk.diag[r] >= 0)
            dmax = std::max(dmax, blk.m.values()[blk.diag[r]]);
    }
    blk.fallback_diag = dmax > 0.0 ? dmax : 1.0;
    return blk;
}

BlockSsorPreconditioner::BlockSsorPreconditioner(
    const CsrMatrix& K, const std::vector<DofKind>& kinds, double omega)
    : omega_(omega), n_(K.rows()) {
    u_ = make_block(K, kinds, DofKind::Displacement, 1.0);
    p_ = make_block(K, kinds, DofKind::Potential, -1.0);
    double dmax = std::max(u_.fallback_diag, p_.fallback_diag);
    for (int r = 0; r < n_; ++r)
        if (kinds[r] == DofKind::Multiplier) mult_dofs_.push_back(r);
    mult_scale_ = dmax > 0.0 ? dmax : 1.0;
}

// z = M^{-1} r for M = (D/w + L) ((2-w)/w D)^{-1} (D/w + L)^T, the standard
// SSOR splitting of the SPD block (L strictly lower, D diagonal). The upper
// solve walks rows in reverse using the strictly-upper entries, which equal
// L^T exactly because assembly produces a bitwise-symmetric matrix.
void BlockSsorPreconditioner::apply_block(const Block& blk,
                                          const Eigen::VectorXd& r,
                                          Eigen::VectorXd& z) const {
    const int n = static_cast<int>(blk.dofs.size());
    if (n == 0) return;
    const auto& rp = blk.m.row_ptr();
    const auto& ci = blk.m.col_idx();
    const auto& va = blk.m.values();
    const double w = omega_;

    static thread_local std::vector<double> t;
    t.assign(n, 0.0);

    // Forward: (D/w + L) t = r_block
    for (int i = 0; i < n; ++i) {
        double s = r[blk.dofs[i]];
        double d = blk.fallback_diag;
        for (int k = rp[i]; k < rp[i + 1]; ++k) {
            int c = ci[k];
            if (c < i)
                s -= va[k] * t[c];
            else if (c == i)
                d = va[k] > 0.0 ? va[k] : blk.fallback_diag;
        }
        t[i] = s * w / d;
    }
    // Scale: t <- ((2-w)/w) D t
    for (int i = 0; i < n; ++i) {
        double d = blk.diag[i] >= 0 ? va[blk.diag[i]] : blk.fallback_diag;
        if (d <= 0.0) d = blk.fallback_diag;
        t[i] *= (2.0 - w) / w * d;
    }
    // Backward: (D/w + U) z = t
    for (int i = n - 1; i >= 0; --i) {
        double s = t[i];
        double d = blk.fallback_diag;
        for (int k = rp[i]; k < rp[i + 1]; ++k) {
            int c = ci[k];
            if (c > i)
                s -= va[k] * z[blk.dofs[c]];
            else if (c == i)
                d = va[k] > 0.0 ? va[k] : blk.fallback_diag;
        }
        z[blk.dofs[i]] = s * w / d;
    }
}

void BlockSsorPreconditioner::apply(const Eigen::VectorXd& r,
                                    Eigen::VectorXd& z) const {
    z.resize(n_);
    apply_block(u_, r, z);
    apply_block(p_, r, z);
    for (int d : mult_dofs_) z[d] = r[d] / mult_scale_;
}

// ---------------------------------------------------------------------------
// MINRES (Paige–Saunders recurrences, SPD preconditioner M; monitors the
// M^{-1}-norm residual estimate, then verifies the true two-norm residual).

namespace {

struct MinresResult {
    int iterations = 0;
    double rel_residual = std::numeric_limits<double>::infinity();
    bool converged = false;
};

MinresResult minres(const CsrMatrix& K, const BlockSsorPreconditioner& M,
                    const Eigen::VectorXd& b, Eigen::VectorXd& x,
                    double rel_tol, int max_iters) {
    MinresResult res;
    const int n = K.rows();
    const double bnorm = b.norm();
    x.setZero(n);
    if (bnorm == 0.0) {
        res.converged = true;
        res.rel_residual = 0.0;
        return res;
    }

    Eigen::VectorXd r1 = b, r2 = b, y(n), v(n), w(n), w1(n), w2(n), tmp(n);
    M.apply(r1, y);
    double beta1 = r1.dot(y);
    if (!(beta1 > 0.0)) throw SolverBreakdown("minres: preconditioner not SPD");
    beta1 = std::sqrt(beta1);

    double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0;
    double phibar = beta1, cs = -1.0, sn = 0.0;
    w.setZero();
    w2.setZero();

    double target = rel_tol; // on the preconditioned residual estimate
    for (int itn = 1; itn <= max_iters; ++itn) {
        double s = 1.0 / beta;
        v = s * y;
        K.multiply(v.data(), tmp.data());
        y = tmp;
        if (itn >= 2) y -= (beta / oldb) * r1;
        double alfa = v.dot(y);
        y -= (alfa / beta) * r2;
        r1 = r2;
        r2 = y;
        M.apply(r2, y);
        oldb = beta;
        beta = r2.dot(y);
        if (beta < -1e-12 * beta1 * beta1)
            throw SolverBreakdown("minres: preconditioner not SPD");
        // Lanczos breakdown (beta == 0) means the residual lies inside the
        // explored Krylov space: run the last rotation and solution update
        // with beta = 0, then exit on the true-residual check below.
        bool lanczos_done = !(beta > 0.0);
        beta = lanczos_done ? 0.0 : std::sqrt(beta);

        double oldeps = epsln;
        double delta = cs * dbar + sn * alfa;
        double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        double gamma = std::sqrt(gbar * gbar + beta * beta);
        gamma = std::max(gamma, std::numeric_limits<double>::min());
        cs = gbar / gamma;
        sn = beta / gamma;
        double phi = cs * phibar;
        phibar = sn * phibar;

        w1 = w2;
        w2 = w;
        w = (v - oldeps * w1 - delta * w2) / gamma;
        x += phi * w;
        res.iterations = itn;

        if (phibar <= target * beta1 || itn == max_iters || lanczos_done) {
            K.multiply(x.data(), tmp.data());
            res.rel_residual = (tmp - b).norm() / bnorm;
            if (res.rel_residual <= rel_tol) {
                res.converged = true;
                return res;
            }
            if (itn == max_iters || lanczos_done) return res;
            // Estimate was optimistic: tighten the internal target and keep
            // iterating with the same Lanczos state.
            target *= 0.25;
            if (target < 1e-16) return res;
        }
    }
    return res;
}

} // namespace

// ---------------------------------------------------------------------------
// SymmetricSolver

struct SymmetricSolver::Impl {
    using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

    const CsrMatrix& K;
    const std::vector<DofKind>& kinds;
    SolveOptions opts;
    mutable SpMat A; // direct path copy
    mutable std::unique_ptr<Eigen::SparseLU<SpMat>> lu;
    std::unique_ptr<BlockSsorPreconditioner> prec;
    bool direct = false;

    void factorize() const {
        // The assembled matrix is bitwise symmetric, so its CSR arrays are a
        // valid CSC representation of the same matrix.
        Eigen::Map<const SpMat> view(K.rows(), K.cols(), K.nonzeros(),
                                     K.row_ptr().data(), K.col_idx().data(),
                                     K.values().data());
        A = view;
        lu = std::make_unique<Eigen::SparseLU<SpMat>>();
        lu->compute(A);
        if (lu->info() != Eigen::Success)
            throw SolverBreakdown("sparse LU factorization failed");
    }

    Impl(const CsrMatrix& K_, const std::vector<DofKind>& kinds_,
         const SolveOptions& o)
        : K(K_), kinds(kinds_), opts(o) {
        direct = opts.prefer_direct && K.rows() <= opts.direct_dof_limit;
        if (direct)
            factorize();
        else
            prec = std::make_unique<BlockSsorPreconditioner>(K, kinds,
                                                             opts.ssor_omega);
    }

    // Direct solve of K x = b with one refinement step if needed; the
    // factorization must exist.
    double direct_solve(const Eigen::VectorXd& b, Eigen::VectorXd& x,
                        double bnorm, const std::string& label) const {
        x = lu->solve(b);
        if (lu->info() != Eigen::Success)
            throw SolverBreakdown("sparse LU solve failed: " + label);
        Eigen::VectorXd r = b - K.multiply(x);
        if (r.norm() / bnorm > opts.rel_tol) {
            Eigen::VectorXd dx = lu->solve(r);
            x += dx;
            r = b - K.multiply(x);
        }
        return r.norm() / bnorm;
    }

    SolveStats run(const Eigen::VectorXd& b, Eigen::VectorXd& x,
                   const std::string& label) const {
        auto t0 = Clock::now();
        SolveStats st;
        st.label = label;
        double bnorm = b.norm();
        if (bnorm == 0.0) {
            st.method = direct ? "sparse_lu" : "minres_ssor";
            x.setZero(K.rows());
            st.rel_residual = 0.0;
        } else if (direct) {
            st.method = "sparse_lu";
            st.rel_residual = direct_solve(b, x, bnorm, label);
        } else {
            st.method = "minres_ssor";
            auto mr = minres(K, *prec, b, x, opts.rel_tol, opts.max_iterations);
            st.iterations = mr.iterations;
            st.rel_residual = mr.rel_residual;
            if (!mr.converged) {
                if (K.rows() > opts.fallback_dof_limit)
                    throw SolverBreakdown(
                        "minres failed to reach tolerance for case " + label +
                        " (residual " + std::to_string(mr.rel_residual) + ")");
                // Stalled iteration on a system that still fits the direct
                // path: factorize once and recover.
                if (!lu) factorize();
                st.method = "sparse_lu_fallback";
                st.rel_residual = direct_solve(b, x, bnorm, label);
            }
        }
        if (st.rel_residual > opts.rel_tol)
            throw SolverBreakdown("solve residual above tolerance for case " +
                                  label);
        st.seconds = elapsed(t0);
        if (opts.log) log_solve(st, K.rows());
        return st;
    }
};

SymmetricSolver::SymmetricSolver(const CsrMatrix& K,
                                 const std::vector<DofKind>& kinds,
                                 const SolveOptions& opts)
    : impl_(new Impl(K, kinds, opts)), direct_(impl_->direct) {}

SymmetricSolver::~SymmetricSolver() { delete impl_; }

SolveStats SymmetricSolver::solve(const Eigen::VectorXd& b, Eigen::VectorXd& x,
                                  const std::string& label) const {
    return impl_->run(b, x, label);
}

} // namespace piezocell
