#include "flexkacz/outer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "flexkacz/errors.hpp"

namespace flexkacz {

namespace {

void make_rotation(double a, double b, double& cs, double& sn, double& r) {
    r = std::hypot(a, b);
    if (r == 0.0) {
        cs = 1.0;
        sn = 0.0;
    } else {
        cs = a / r;
        sn = b / r;
    }
}

}  // namespace

void SolverConfig::validate() const {
    if (!(tol > 0.0)) throw DomainError("tol must be positive");
    if (max_outer < 1) throw DomainError("max_outer must be >= 1");
    if (ell_max < 1) throw DomainError("ell_max must be >= 1");
    if (!(inner_decay > 0.0 && inner_decay < 1.0)) throw DomainError("inner_decay must lie in (0, 1)");
    if (!(inner_floor > 0.0 && inner_floor <= 1.0)) throw DomainError("inner_floor must lie in (0, 1]");
    inner.validate();
}

ArnoldiState::ArnoldiState(DenseVector r0, double breakdown_tol) : breakdown_tol_(breakdown_tol) {
    beta_ = norm2(r0);
    if (beta_ == 0.0) throw DomainError("Arnoldi start vector is zero");
    scale(r0, 1.0 / beta_);
    v_.push_back(std::move(r0));
    g_.push_back(beta_);
}

ArnoldiState::StepResult ArnoldiState::step(DenseVector w) {
    const std::size_t k = v_.size();  // current basis size; new column index k-1
    StepResult out;
    out.h.resize(k, 0.0);

    const double pre_norm = norm2(w);
    for (std::size_t i = 0; i < k; ++i) {
        const double hi = dot(w, v_[i]);
        out.h[i] = hi;
        axpy(-hi, v_[i], w);
    }
    double after = norm2(w);
    if (after < 0.7 * pre_norm) {  // Kahan-Parlett criterion
        for (std::size_t i = 0; i < k; ++i) {
            const double c = dot(w, v_[i]);
            out.h[i] += c;
            axpy(-c, v_[i], w);
        }
        after = norm2(w);
    }
    out.h_subdiag = after;
    out.breakdown = pre_norm == 0.0 || after <= breakdown_tol_ * pre_norm;
    if (out.breakdown) out.h_subdiag = 0.0;

    for (double hv : out.h) h_maxabs_ = std::max(h_maxabs_, std::fabs(hv));
    h_maxabs_ = std::max(h_maxabs_, out.h_subdiag);

    std::vector<double> full = out.h;
    full.push_back(out.h_subdiag);
    h_cols_.push_back(full);

    // rotate the new column through the accumulated Givens rotations
    std::vector<double> col = full;
    const std::size_t j = r_cols_.size();  // == k-1
    for (std::size_t i = 0; i < j; ++i) {
        const double t = cs_[i] * col[i] + sn_[i] * col[i + 1];
        col[i + 1] = -sn_[i] * col[i] + cs_[i] * col[i + 1];
        col[i] = t;
    }
    double cs, sn, r;
    make_rotation(col[j], col[j + 1], cs, sn, r);
    col[j] = r;
    col.resize(j + 1);
    cs_.push_back(cs);
    sn_.push_back(sn);
    r_cols_.push_back(std::move(col));

    const double gj = g_[j];
    g_[j] = cs * gj;
    g_.push_back(-sn * gj);

    if (!out.breakdown) {
        scale(w, 1.0 / out.h_subdiag);
        v_.push_back(std::move(w));
    }
    return out;
}

std::vector<double> ArnoldiState::solve_y() const {
    const std::size_t k = r_cols_.size();
    const double diag_tol = 1e-14 * h_maxabs_;
    std::vector<double> y(k, 0.0);
    for (std::size_t jj = k; jj-- > 0;) {
        double acc = g_[jj];
        for (std::size_t c = jj + 1; c < k; ++c) acc -= r_cols_[c][jj] * y[c];
        const double d = r_cols_[jj][jj];
        if (std::fabs(d) <= diag_tol)
            throw SingularTriangular("rotated diagonal entry " + std::to_string(jj) + " below threshold");
        y[jj] = acc / d;
    }
    return y;
}

std::pair<std::vector<double>, double> hessenberg_lsq(const std::vector<std::vector<double>>& h_columns,
                                                      double beta) {
    const std::size_t k = h_columns.size();
    if (k == 0) return {{}, std::fabs(beta)};
    double h_maxabs = 0.0;
    for (const auto& col : h_columns)
        for (double v : col) h_maxabs = std::max(h_maxabs, std::fabs(v));

    std::vector<std::vector<double>> R(k);
    std::vector<double> cs(k), sn(k), g(k + 1, 0.0);
    g[0] = beta;
    for (std::size_t jcol = 0; jcol < k; ++jcol) {
        if (h_columns[jcol].size() != jcol + 2)
            throw DimensionMismatch("hessenberg column " + std::to_string(jcol) + " has wrong length");
        std::vector<double> col = h_columns[jcol];
        for (std::size_t i = 0; i < jcol; ++i) {
            const double t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        double r;
        make_rotation(col[jcol], col[jcol + 1], cs[jcol], sn[jcol], r);
        col[jcol] = r;
        col.resize(jcol + 1);
        R[jcol] = std::move(col);
        const double gj = g[jcol];
        g[jcol] = cs[jcol] * gj;
        g[jcol + 1] = -sn[jcol] * gj;
    }
    std::vector<double> y(k, 0.0);
    const double diag_tol = 1e-14 * h_maxabs;
    for (std::size_t jj = k; jj-- > 0;) {
        double acc = g[jj];
        for (std::size_t c = jj + 1; c < k; ++c) acc -= R[c][jj] * y[c];
        if (std::fabs(R[jj][jj]) <= diag_tol)
            throw SingularTriangular("rotated diagonal entry " + std::to_string(jj) + " below threshold");
        y[jj] = acc / R[jj][jj];
    }
    return {std::move(y), std::fabs(g[k])};
}

DenseVector assemble_flexible(const DenseVector& x0, const std::vector<DenseVector>& Z,
                              const std::vector<double>& y) {
    if (y.size() > Z.size()) throw DimensionMismatch("assemble_solution: more coefficients than basis vectors");
    if (Z.empty()) throw DimensionMismatch("assemble_solution: empty basis");
    DenseVector x = x0;
    for (std::size_t j = 0; j < y.size(); ++j) {
        if (Z[j].size() != x.size()) throw DimensionMismatch("assemble_solution: basis length mismatch");
        axpy(y[j], Z[j], x);
    }
    return x;
}

namespace {

using clock_t_ = std::chrono::steady_clock;

double seconds_since(clock_t_::time_point t0) {
    return std::chrono::duration<double>(clock_t_::now() - t0).count();
}

struct OuterLoopOutcome {
    SolveStatus status = SolveStatus::MaxIterations;
    std::vector<double> y;
    int k = 0;
};

}  // namespace

SolveReport fab_gmres(const SparseMatrix& A, const DenseVector& b, const SolverConfig& config,
                      const GramMatrix* C, SolveTrace* trace, const DenseVector* x0_in) {
    config.validate();
    if (static_cast<index_t>(b.size()) != A.rows()) throw DimensionMismatch("fab_gmres: b length != rows");
    const auto t0 = clock_t_::now();

    SolveReport report;
    report.seed = config.seed;
    report.omega_used = config.inner.omega;
    report.ell_max_used = config.ell_max;

    DenseVector x0(static_cast<std::size_t>(A.cols()), 0.0);
    if (x0_in) {
        if (static_cast<index_t>(x0_in->size()) != A.cols())
            throw DimensionMismatch("fab_gmres: x0 length != cols");
        x0 = *x0_in;
    }

    const double bnorm = norm2(b);
    DenseVector r0 = b;
    if (x0_in) {
        DenseVector ax0 = A.multiply(x0);
        for (std::size_t i = 0; i < r0.size(); ++i) r0[i] -= ax0[i];
    }
    if (norm2(r0) == 0.0 || bnorm == 0.0) {
        report.x = x0;
        report.converged = true;
        report.status = SolveStatus::Converged;
        report.solve_seconds = seconds_since(t0);
        return report;
    }

    const GramMatrix* gram = config.use_gram ? C : nullptr;
    Rng rng(config.seed);
    ArnoldiState arnoldi(r0, config.breakdown_tol);
    std::vector<DenseVector> Z;
    InnerRunOptions inner_opts;
    inner_opts.flops = &report.flops;
    inner_opts.model = config.flop_model;

    OuterLoopOutcome outcome;
    const long budget = config.inner.tag == InnerTag::NESOR
                            ? config.ell_max * static_cast<long>(A.rows())
                            : config.ell_max;

    double last_relres = -1.0;
    int flat_steps = 0;

    for (int k = 1; k <= config.max_outer; ++k) {
        const double thr = std::max(std::pow(config.inner_decay, k), config.inner_floor);
        InnerRunResult inner =
            run_inner(config.inner, A, gram, arnoldi.basis(k - 1), budget, thr, rng, inner_opts);
        report.total_inner += inner.projections_used;
        report.per_step_inner.push_back(inner.projections_used);
        Z.push_back(std::move(inner.z));

        DenseVector w = A.multiply(Z.back());
        const auto step = arnoldi.step(std::move(w));

        const double relres = arnoldi.residual_norm() / bnorm;
        report.relres_history.push_back(relres);
        report.per_step_seconds.push_back(seconds_since(t0));
        report.outer_iters = k;

        if (last_relres >= 0.0 && std::fabs(relres - last_relres) <= 1e-15) {
            if (++flat_steps >= 50) report.stagnation_warning = true;
        } else {
            flat_steps = 0;
        }
        last_relres = relres;

        if (step.breakdown) {
            try {
                outcome.y = arnoldi.solve_y();
                outcome.status = SolveStatus::BreakdownExact;
            } catch (const SingularTriangular&) {
                // best iterate from the previous, nonsingular system
                outcome.status = SolveStatus::BreakdownSingularH;
                std::vector<std::vector<double>> prev(arnoldi.h_columns().begin(),
                                                      arnoldi.h_columns().end() - 1);
                outcome.y = hessenberg_lsq(prev, arnoldi.beta()).first;
            }
            outcome.k = k;
            break;
        }
        if (relres <= config.tol) {
            outcome.y = arnoldi.solve_y();
            outcome.status = SolveStatus::Converged;
            outcome.k = k;
            break;
        }
    }

    if (outcome.y.empty() && outcome.status == SolveStatus::MaxIterations) {
        outcome.y = arnoldi.solve_y();
        outcome.k = report.outer_iters;
    }

    report.x = assemble_flexible(x0, Z, outcome.y);
    report.status = outcome.status;
    report.converged =
        outcome.status == SolveStatus::Converged || outcome.status == SolveStatus::BreakdownExact;

    DenseVector rfin = A.multiply(report.x);
    for (std::size_t i = 0; i < rfin.size(); ++i) rfin[i] = b[i] - rfin[i];
    report.final_direct_relres = norm2(rfin) / bnorm;
    if (report.status == SolveStatus::BreakdownExact && report.final_direct_relres > config.tol)
        report.converged = report.final_direct_relres <= config.tol;

    if (trace) {
        trace->beta = arnoldi.beta();
        trace->V = arnoldi.basis_vectors();
        trace->Z = Z;
        trace->H_cols = arnoldi.h_columns();
    }
    report.solve_seconds = seconds_since(t0);
    return report;
}

SolveReport ab_gmres(const SparseMatrix& A, const DenseVector& b, const SolverConfig& config,
                     SolveTrace* trace, const DenseVector* x0_in) {
    config.validate();
    if (config.inner.tag != InnerTag::NESOR)
        throw DomainError("ab_gmres uses a fixed NE-SOR preconditioner; use fab_gmres for Kaczmarz-type inner methods");
    if (static_cast<index_t>(b.size()) != A.rows()) throw DimensionMismatch("ab_gmres: b length != rows");
    const auto t0 = clock_t_::now();

    SolveReport report;
    report.seed = config.seed;
    report.omega_used = config.inner.omega;
    report.ell_max_used = config.ell_max;

    DenseVector x0(static_cast<std::size_t>(A.cols()), 0.0);
    if (x0_in) {
        if (static_cast<index_t>(x0_in->size()) != A.cols()) throw DimensionMismatch("ab_gmres: x0 length != cols");
        x0 = *x0_in;
    }
    const double bnorm = norm2(b);
    DenseVector r0 = b;
    if (x0_in) {
        DenseVector ax0 = A.multiply(x0);
        for (std::size_t i = 0; i < r0.size(); ++i) r0[i] -= ax0[i];
    }
    if (norm2(r0) == 0.0 || bnorm == 0.0) {
        report.x = x0;
        report.converged = true;
        report.status = SolveStatus::Converged;
        report.solve_seconds = seconds_since(t0);
        return report;
    }

    Rng rng(config.seed);
    ArnoldiState arnoldi(r0, config.breakdown_tol);
    const long budget = config.ell_max * static_cast<long>(A.rows());  // sweeps -> projections
    InnerRunOptions inner_opts;
    inner_opts.flops = &report.flops;
    inner_opts.model = config.flop_model;

    OuterLoopOutcome outcome;
    double last_relres = -1.0;
    int flat_steps = 0;

    for (int k = 1; k <= config.max_outer; ++k) {
        // fixed preconditioner: exactly ell_max sweeps, no early stop
        InnerRunResult inner = run_inner(config.inner, A, nullptr, arnoldi.basis(k - 1), budget, 0.0, rng, inner_opts);
        report.total_inner += inner.projections_used;
        report.per_step_inner.push_back(inner.projections_used);

        DenseVector w = A.multiply(inner.z);
        const auto step = arnoldi.step(std::move(w));

        const double relres = arnoldi.residual_norm() / bnorm;
        report.relres_history.push_back(relres);
        report.per_step_seconds.push_back(seconds_since(t0));
        report.outer_iters = k;

        if (last_relres >= 0.0 && std::fabs(relres - last_relres) <= 1e-15) {
            if (++flat_steps >= 50) report.stagnation_warning = true;
        } else {
            flat_steps = 0;
        }
        last_relres = relres;

        if (step.breakdown || relres <= config.tol) {
            outcome.y = arnoldi.solve_y();
            outcome.status = step.breakdown ? SolveStatus::BreakdownExact : SolveStatus::Converged;
            outcome.k = k;
            break;
        }
    }
    if (outcome.y.empty() && outcome.status == SolveStatus::MaxIterations) {
        outcome.y = arnoldi.solve_y();
        outcome.k = report.outer_iters;
    }

    // u_k = V_k y_k, then one more fixed preconditioner application
    DenseVector u(b.size(), 0.0);
    for (std::size_t j = 0; j < outcome.y.size(); ++j) axpy(outcome.y[j], arnoldi.basis(static_cast<int>(j)), u);
    InnerRunResult fin = run_inner(config.inner, A, nullptr, u, budget, 0.0, rng, inner_opts);
    report.total_inner += fin.projections_used;

    report.x = x0;
    for (std::size_t i = 0; i < report.x.size(); ++i) report.x[i] += fin.z[i];
    report.status = outcome.status;
    report.converged =
        outcome.status == SolveStatus::Converged || outcome.status == SolveStatus::BreakdownExact;

    DenseVector rfin = A.multiply(report.x);
    for (std::size_t i = 0; i < rfin.size(); ++i) rfin[i] = b[i] - rfin[i];
    report.final_direct_relres = norm2(rfin) / bnorm;

    if (trace) {
        trace->beta = arnoldi.beta();
        trace->V = arnoldi.basis_vectors();
        trace->H_cols = arnoldi.h_columns();
    }
    report.solve_seconds = seconds_since(t0);
    return report;
}

}  // namespace flexkacz
