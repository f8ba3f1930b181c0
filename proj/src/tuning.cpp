#include "flexkacz/tuning.hpp"

#include <chrono>

#include "flexkacz/errors.hpp"

namespace flexkacz {

TuningResult tune(const SparseMatrix& A, const GramMatrix* C, const DenseVector& b, InnerTag tag,
                  double eta, long cap, std::uint64_t seed) {
    if (!(eta > 0.0 && eta < 1.0)) throw DomainError("tune: eta must lie in (0, 1)");
    if (norm2(b) == 0.0) throw ZeroRhs("tune: right-hand side is zero");
    const auto t0 = std::chrono::steady_clock::now();
    const index_t m = A.rows();
    if (cap <= 0) cap = 50 * static_cast<long>(m);

    TuningResult result;
    result.eta = eta;

    // phase 1: omega = 1 until the relative residual reaches eta
    InnerMethod probe{tag, 1.0};
    {
        Rng rng(seed);
        InnerRunOptions opts;
        opts.checkpoints = &result.checkpoints;
        InnerRunResult run = run_inner(probe, A, C, b, cap, eta, rng, opts);
        result.cap_reached = !run.reached_threshold;
        if (tag == InnerTag::NESOR)
            result.ell_max = (run.projections_used + static_cast<long>(m) - 1) / static_cast<long>(m);
        else
            result.ell_max = run.projections_used;
        if (result.ell_max < 1) result.ell_max = 1;
    }

    // phase 2: exactly ell_max iterations at each grid omega, shared seed
    const long budget =
        tag == InnerTag::NESOR ? result.ell_max * static_cast<long>(m) : result.ell_max;
    result.residual_at_omega.resize(19);
    double best = -1.0;
    for (int g = 1; g <= 19; ++g) {
        const double omega = static_cast<double>(g) / 10.0;
        Rng rng(seed);
        InnerRunResult run = run_inner(InnerMethod{tag, omega}, A, C, b, budget, 0.0, rng);
        result.residual_at_omega[static_cast<std::size_t>(g - 1)] = run.final_residual_norm;
        if (best < 0.0 || run.final_residual_norm < best) {
            best = run.final_residual_norm;
            result.omega_opt = omega;
        }
    }

    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace flexkacz
