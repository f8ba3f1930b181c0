#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "flexkacz/inner.hpp"

namespace flexkacz {

struct TuningResult {
    long ell_max = 0;            // projections; sweeps for NESOR
    double omega_opt = 1.0;      // on the grid 0.1, 0.2, ..., 1.9
    double eta = 0.1;
    std::vector<double> residual_at_omega;  // 19 final residual norms
    double seconds = 0.0;
    bool cap_reached = false;
    /// (projections, relative residual) at each phase-1 stopping-test
    /// evaluation; the same schedule run_inner uses.
    std::vector<std::pair<long, double>> checkpoints;
};

/// Two-phase parameter tuning on A z = b before the outer iterations:
/// phase 1 runs the method with omega = 1 until the relative residual drops
/// to eta and records the projection count as ell_max (capped at `cap`
/// projections, default 50*m); phase 2 reruns with that budget for each grid
/// omega, restarting the RNG from `seed` per run, and picks the omega with
/// the smallest final residual (ties -> smallest omega).
TuningResult tune(const SparseMatrix& A, const GramMatrix* C, const DenseVector& b, InnerTag tag,
                  double eta = 0.1, long cap = 0, std::uint64_t seed = 0);

}  // namespace flexkacz
