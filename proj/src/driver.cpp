#include "flexkacz/driver.hpp"

#include <chrono>

#include "flexkacz/errors.hpp"

namespace flexkacz {

namespace {

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

DriveResult solve_system(const SparseMatrix& A, const DenseVector& b, const DriveOptions& opts) {
    DriveResult result;

    std::unique_ptr<GramMatrix> C;
    double gram_seconds = 0.0;
    const bool want_gram = opts.use_gram && opts.method != InnerTag::NESOR;
    if (want_gram) {
        const auto t0 = std::chrono::steady_clock::now();
        C = std::make_unique<GramMatrix>(GramMatrix::build(A, opts.gram_dense_threshold));
        gram_seconds = elapsed(t0);
        result.gram_density = C->density();
    }

    double omega = opts.omega.value_or(1.0);
    long ell_max = opts.ell_max.value_or(0);
    double tuning_seconds = 0.0;
    if (!opts.omega.has_value() || !opts.ell_max.has_value()) {
        result.tuning = tune(A, C.get(), b, opts.method, opts.eta, opts.tuning_cap, opts.seed);
        result.tuned = true;
        tuning_seconds = result.tuning.seconds;
        if (!opts.omega.has_value()) omega = result.tuning.omega_opt;
        if (!opts.ell_max.has_value()) ell_max = result.tuning.ell_max;
    }
    if (ell_max < 1) throw DomainError("ell_max must be >= 1");

    SolverConfig config;
    config.tol = opts.tol;
    config.max_outer = opts.max_outer;
    config.inner = InnerMethod{opts.method, omega};
    config.ell_max = ell_max;
    config.seed = opts.seed;
    config.use_gram = want_gram;
    config.flop_model = WorkModelMode::Sparse;

    SolveReport report = opts.fixed_nesor ? ab_gmres(A, b, config) : fab_gmres(A, b, config, C.get());
    if (C) {
        charge_gram_build(report.flops, WorkModelMode::Sparse, A.rows(), A.cols(),
                          static_cast<double>(A.nnz()) / static_cast<double>(A.rows()));
    }
    report.gram_seconds = gram_seconds;
    report.tuning_seconds = tuning_seconds;
    result.report = std::move(report);
    return result;
}

}  // namespace flexkacz
