#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "flexkacz/inner.hpp"

namespace flexkacz {

struct SolverConfig {
    double tol = 1e-6;
    int max_outer = 2000;
    InnerMethod inner{};
    long ell_max = 0;          // per-outer-step projection budget (sweeps for NESOR)
    double inner_floor = 0.1;  // floor of the adaptive inner stopping rule
    double inner_decay = 0.9;  // per-outer-step decay of the inner threshold
    std::uint64_t seed = 0;
    bool use_gram = true;
    double breakdown_tol = 1e-14;
    WorkModelMode flop_model = WorkModelMode::None;

    void validate() const;
};

enum class SolveStatus { Converged, MaxIterations, BreakdownExact, BreakdownSingularH };

struct SolveReport {
    DenseVector x;
    bool converged = false;
    SolveStatus status = SolveStatus::MaxIterations;
    bool stagnation_warning = false;
    int outer_iters = 0;
    long total_inner = 0;
    std::vector<double> relres_history;    // Givens recurrence residual per step
    std::vector<long> per_step_inner;
    std::vector<double> per_step_seconds;  // elapsed since solve start
    double final_direct_relres = 0.0;      // ||b - A x|| / ||b|| recomputed at the end
    double omega_used = 1.0;
    long ell_max_used = 0;
    double tuning_seconds = 0.0;
    double solve_seconds = 0.0;
    double gram_seconds = 0.0;
    FlopCounter flops;
    std::uint64_t seed = 0;
};

/// Optional capture of the Krylov bases for property checks.
struct SolveTrace {
    double beta = 0.0;
    std::vector<DenseVector> V;                 // k+1 orthonormal vectors, length m
    std::vector<DenseVector> Z;                 // k preconditioned vectors, length n
    std::vector<std::vector<double>> H_cols;    // column j holds h_{1..j+2, j+1}
};

/// Arnoldi process with modified Gram-Schmidt (one selective
/// re-orthogonalization pass) and incremental Givens least squares on the
/// growing Hessenberg matrix.
class ArnoldiState {
  public:
    ArnoldiState(DenseVector r0, double breakdown_tol = 1e-14);

    double beta() const { return beta_; }
    int size() const { return static_cast<int>(r_cols_.size()); }
    const DenseVector& basis(int i) const { return v_[static_cast<std::size_t>(i)]; }
    const std::vector<DenseVector>& basis_vectors() const { return v_; }
    const std::vector<std::vector<double>>& h_columns() const { return h_cols_; }

    struct StepResult {
        std::vector<double> h;  // h_{1..k, k} for the new column
        double h_subdiag = 0.0;
        bool breakdown = false;
    };

    /// Orthogonalizes w against the basis and absorbs the new Hessenberg
    /// column into the Givens QR. On breakdown no new basis vector is added.
    StepResult step(DenseVector w);

    /// |last rotated rhs entry| = min_y ||beta e1 - Hbar y||.
    double residual_norm() const { return std::fabs(g_[g_.size() - 1]); }

    /// Solves R y = g by back-substitution. Throws SingularTriangular when a
    /// rotated diagonal falls below 1e-14 * max|Hbar|.
    std::vector<double> solve_y() const;

  private:
    double beta_ = 0.0;
    double breakdown_tol_ = 1e-14;
    double h_maxabs_ = 0.0;
    std::vector<DenseVector> v_;
    std::vector<std::vector<double>> h_cols_;   // raw Hessenberg columns
    std::vector<std::vector<double>> r_cols_;   // rotated (triangular) columns
    std::vector<double> cs_, sn_;
    std::vector<double> g_;
};

/// From-scratch Givens solve of min_y ||beta e1 - Hbar y|| for a
/// (k+1) x k upper-Hessenberg matrix given column-wise (column j has j+2
/// entries). Returns (y, residual norm). Independent of ArnoldiState's
/// incremental path.
std::pair<std::vector<double>, double> hessenberg_lsq(const std::vector<std::vector<double>>& h_columns,
                                                      double beta);

/// x0 + Z y. Throws DimensionMismatch if y and Z disagree.
DenseVector assemble_flexible(const DenseVector& x0, const std::vector<DenseVector>& Z,
                              const std::vector<double>& y);

/// Flexible AB-GMRES with a Kaczmarz-type inner preconditioner applied per
/// outer step under the adaptive threshold max(inner_decay^k, inner_floor).
SolveReport fab_gmres(const SparseMatrix& A, const DenseVector& b, const SolverConfig& config,
                      const GramMatrix* C = nullptr, SolveTrace* trace = nullptr,
                      const DenseVector* x0 = nullptr);

/// AB-GMRES with a fixed NE-SOR preconditioner: the same ell_max sweeps and
/// omega every outer step, solution assembled through one final
/// preconditioner application. config.inner.tag must be NESOR.
SolveReport ab_gmres(const SparseMatrix& A, const DenseVector& b, const SolverConfig& config,
                     SolveTrace* trace = nullptr, const DenseVector* x0 = nullptr);

}  // namespace flexkacz
