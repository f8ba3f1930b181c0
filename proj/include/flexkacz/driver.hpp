#pragma once

#include <memory>
#include <optional>

#include "flexkacz/outer.hpp"
#include "flexkacz/tuning.hpp"

namespace flexkacz {

struct DriveOptions {
    InnerTag method = InnerTag::GRK;
    bool fixed_nesor = false;  // run AB-GMRES with a fixed NE-SOR preconditioner
    std::optional<double> omega;
    std::optional<long> ell_max;
    double tol = 1e-6;
    int max_outer = 2000;
    double eta = 0.1;
    long tuning_cap = 0;  // 0 -> 50*m projections
    std::uint64_t seed = 0;
    bool use_gram = true;
    double gram_dense_threshold = GramMatrix::kDefaultDenseThreshold;
};

struct DriveResult {
    SolveReport report;
    TuningResult tuning;
    bool tuned = false;
    double gram_density = -1.0;  // < 0 when no Gram matrix was built
};

/// Builds C = A A^T when the method profits from it, tunes omega / ell_max
/// unless both are pinned, then runs fab_gmres (or ab_gmres when
/// fixed_nesor). Gram, tuning and solve wall times are itemized in the
/// report.
DriveResult solve_system(const SparseMatrix& A, const DenseVector& b, const DriveOptions& opts);

}  // namespace flexkacz
