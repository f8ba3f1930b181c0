#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flexkacz/gram.hpp"
#include "flexkacz/rng.hpp"
#include "flexkacz/sparse_matrix.hpp"
#include "flexkacz/vec.hpp"
#include "flexkacz/workmodel.hpp"

namespace flexkacz {

enum class InnerTag { NESOR, GK, RK, GRK };

const char* to_string(InnerTag tag);
std::optional<InnerTag> parse_inner_tag(const std::string& name);

struct InnerMethod {
    InnerTag tag = InnerTag::GRK;
    double omega = 1.0;

    /// Throws DomainError unless 0 < omega < 2.
    void validate() const;
};

/// State of one inner run: iterate z (length n), residual s = v - A z
/// (length m), projection counter.
struct InnerState {
    DenseVector z;
    DenseVector s;
    long projections = 0;
};

/// z += omega * (s[i] / ||alpha_i||^2) * alpha_i. Does not touch s; in
/// exact arithmetic the new residual component i would be (1-omega)*s[i].
/// Throws ZeroRow when row i has zero norm.
void kaczmarz_project(InnerState& state, index_t i, const SparseMatrix& A, double omega);

/// s -= omega * (s[i] / C(i,i)) * C_(i). Call with the same pre-projection
/// s[i] that kaczmarz_project consumed.
void residual_update(InnerState& state, index_t i, const GramMatrix& C, double omega);

/// argmax_i |s_i|, ties broken by lowest index. Throws ZeroResidual on s = 0.
index_t select_gk(const DenseVector& s);

/// Cumulative-prefix table over squared row norms for O(log m) weighted draws.
class RowSampler {
  public:
    explicit RowSampler(const SparseMatrix& A);
    index_t draw(Rng& rng) const;

  private:
    std::vector<double> prefix_;
};

index_t select_rk(Rng& rng, const RowSampler& sampler);

/// Greedy randomized selection: threshold set U_p from
/// eps_p = (max_i(s_i^2/||alpha_i||^2)/||s||^2 + 1/||A||_F^2) / 2,
/// then a draw weighted by s_i^2 within U_p. U_p always contains the row
/// maximizing s_i^2/||alpha_i||^2 (asserted). Throws ZeroResidual on s = 0.
index_t select_grk(Rng& rng, const InnerState& state, const SparseMatrix& A);

/// Which appendix cost-model convention to charge into a FlopCounter.
enum class WorkModelMode { None, Dense, Sparse };

/// Charge the one-time Gram construction under the given convention.
void charge_gram_build(FlopCounter& fc, WorkModelMode mode, index_t m, index_t n, double q);

struct InnerRunResult {
    DenseVector z;
    long projections_used = 0;
    double final_residual_norm = 0.0;
    bool reached_threshold = false;
};

struct InnerRunOptions {
    FlopCounter* flops = nullptr;
    WorkModelMode model = WorkModelMode::None;
    /// When set, (projections, relative residual) is appended at every
    /// point where the stopping test is evaluated.
    std::vector<std::pair<long, double>>* checkpoints = nullptr;
};

/// Runs one preconditioner application z = B^(l) v from z = 0.
///
/// Stops when ||v - A z|| <= stop_threshold * ||v|| or after `budget`
/// projections (one NESOR sweep counts as m projections). stop_threshold = 0
/// disables the residual test and runs the full budget. The threshold test
/// is first evaluated after m projections (one sweep's worth) for every
/// method, then per projection for GK/GRK/RK with a Gram matrix, every m
/// projections for RK without one, and at sweep boundaries for NESOR; an
/// exactly zero residual stops at any point. GK and GRK use the recursive
/// residual update when C is given and recompute s from scratch each step
/// otherwise. s is refreshed from v - A z every 10*m projections to bound
/// drift.
InnerRunResult run_inner(const InnerMethod& method, const SparseMatrix& A, const GramMatrix* C,
                         const DenseVector& v, long budget, double stop_threshold, Rng& rng,
                         const InnerRunOptions& opts = {});

}  // namespace flexkacz
