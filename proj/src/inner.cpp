#include "flexkacz/inner.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "flexkacz/errors.hpp"

namespace flexkacz {

const char* to_string(InnerTag tag) {
    switch (tag) {
        case InnerTag::NESOR: return "nesor";
        case InnerTag::GK: return "gk";
        case InnerTag::RK: return "rk";
        case InnerTag::GRK: return "grk";
    }
    return "?";
}

std::optional<InnerTag> parse_inner_tag(const std::string& name) {
    if (name == "nesor") return InnerTag::NESOR;
    if (name == "gk") return InnerTag::GK;
    if (name == "rk") return InnerTag::RK;
    if (name == "grk") return InnerTag::GRK;
    return std::nullopt;
}

void InnerMethod::validate() const {
    if (!(omega > 0.0 && omega < 2.0))
        throw DomainError("relaxation parameter omega must lie in (0, 2), got " + std::to_string(omega));
}

void kaczmarz_project(InnerState& state, index_t i, const SparseMatrix& A, double omega) {
    const double nrm = A.row_norm_sq(i);
    if (nrm <= 0.0) throw ZeroRow("projection onto zero row " + std::to_string(i));
    A.add_scaled_row(i, omega * state.s[i] / nrm, state.z);
    ++state.projections;
}

void residual_update(InnerState& state, index_t i, const GramMatrix& C, double omega) {
    C.axpy_column(i, -omega * state.s[i] / C.diag(i), state.s);
}

index_t select_gk(const DenseVector& s) {
    index_t best = -1;
    double best_abs = 0.0;
    for (index_t i = 0; i < static_cast<index_t>(s.size()); ++i) {
        const double a = std::fabs(s[i]);
        if (a > best_abs) {
            best_abs = a;
            best = i;
        }
    }
    if (best < 0) throw ZeroResidual("residual is identically zero");
    return best;
}

RowSampler::RowSampler(const SparseMatrix& A) {
    prefix_.resize(static_cast<std::size_t>(A.rows()));
    double acc = 0.0;
    for (index_t i = 0; i < A.rows(); ++i) {
        acc += A.row_norm_sq(i);
        prefix_[i] = acc;
    }
}

index_t RowSampler::draw(Rng& rng) const {
    const double u = rng.next_double() * prefix_.back();
    auto it = std::upper_bound(prefix_.begin(), prefix_.end(), u);
    if (it == prefix_.end()) --it;
    return static_cast<index_t>(it - prefix_.begin());
}

index_t select_rk(Rng& rng, const RowSampler& sampler) { return sampler.draw(rng); }

index_t select_grk(Rng& rng, const InnerState& state, const SparseMatrix& A) {
    const DenseVector& s = state.s;
    const double snorm2 = norm2_sq(s);
    if (snorm2 == 0.0) throw ZeroResidual("residual is identically zero");

    index_t argmax = -1;
    double max_ratio = -1.0;
    for (index_t i = 0; i < static_cast<index_t>(s.size()); ++i) {
        const double nrm = A.row_norm_sq(i);
        if (nrm <= 0.0) continue;
        const double ratio = s[i] * s[i] / nrm;
        if (ratio > max_ratio) {
            max_ratio = ratio;
            argmax = i;
        }
    }
    if (argmax < 0) throw ZeroResidual("residual is identically zero");

    const double eps = 0.5 * (max_ratio / snorm2 + 1.0 / A.frobenius_sq());
    const double cutoff = eps * snorm2;

    double total = 0.0;
    static thread_local std::vector<index_t> members;
    members.clear();
    for (index_t i = 0; i < static_cast<index_t>(s.size()); ++i) {
        if (s[i] * s[i] >= cutoff * A.row_norm_sq(i) && A.row_norm_sq(i) > 0.0) {
            members.push_back(i);
            total += s[i] * s[i];
        }
    }
    if (members.empty() || !std::binary_search(members.begin(), members.end(), argmax)) {
        members.push_back(argmax);
        std::sort(members.begin(), members.end());
        total += s[argmax] * s[argmax];
    }
    assert(!members.empty());

    const double u = rng.next_double() * total;
    double acc = 0.0;
    for (index_t i : members) {
        acc += s[i] * s[i];
        if (u < acc) return i;
    }
    return members.back();
}

void charge_gram_build(FlopCounter& fc, WorkModelMode mode, index_t m, index_t n, double q) {
    const double md = static_cast<double>(m);
    if (mode == WorkModelMode::Dense)
        fc.gram_build_flops += md * md * static_cast<double>(n);
    else if (mode == WorkModelMode::Sparse)
        fc.gram_build_flops += q * md * md;
}

namespace {

struct Charger {
    FlopCounter* fc;
    WorkModelMode mode;
    double m, n, nz, q, p;

    void selection() const {
        if (!fc || mode == WorkModelMode::None) return;
        fc->selection_flops += mode == WorkModelMode::Dense ? m * n : nz;
    }
    void projection() const {
        if (!fc || mode == WorkModelMode::None) return;
        fc->projection_flops += mode == WorkModelMode::Dense ? n : q;
    }
    void residual() const {
        if (!fc || mode == WorkModelMode::None) return;
        fc->residual_update_flops += mode == WorkModelMode::Dense ? m : m * p;
    }
};

}  // namespace

InnerRunResult run_inner(const InnerMethod& method, const SparseMatrix& A, const GramMatrix* C,
                         const DenseVector& v, long budget, double stop_threshold, Rng& rng,
                         const InnerRunOptions& opts) {
    method.validate();
    if (budget < 1) throw DomainError("inner budget must be >= 1");
    if (stop_threshold < 0.0 || stop_threshold > 1.0)
        throw DomainError("inner stop threshold must lie in [0, 1]");
    if (static_cast<index_t>(v.size()) != A.rows()) throw DimensionMismatch("run_inner: v length != rows");

    const index_t m = A.rows();
    const index_t n = A.cols();
    const double omega = method.omega;
    const double vnorm = norm2(v);

    InnerRunResult result;
    result.z.assign(static_cast<std::size_t>(n), 0.0);
    if (vnorm == 0.0) return result;

    Charger charge{opts.flops, opts.model,
                   static_cast<double>(m), static_cast<double>(n),
                   static_cast<double>(A.nnz()),
                   static_cast<double>(A.nnz()) / static_cast<double>(m),
                   C ? C->density() : 0.0};

    InnerState state;
    state.z.assign(static_cast<std::size_t>(n), 0.0);
    state.s = v;

    const long refresh_every = 10 * static_cast<long>(m);
    long next_refresh = refresh_every;

    auto refresh_residual = [&] {
        state.s = v;
        for (index_t i = 0; i < m; ++i) state.s[i] -= A.row_dot(i, state.z);
    };
    auto note_checkpoint = [&](double relres) {
        if (opts.checkpoints) opts.checkpoints->emplace_back(state.projections, relres);
    };
    auto maybe_refresh = [&] {
        if (state.projections >= next_refresh) {
            refresh_residual();
            next_refresh += refresh_every;
        }
    };

    bool done = false;
    const bool maintain_via_gram = C != nullptr;

    if (method.tag == InnerTag::NESOR) {
        while (!done && state.projections < budget) {
            for (index_t i = 0; i < m && state.projections < budget; ++i) {
                state.s[i] = v[i] - A.row_dot(i, state.z);
                kaczmarz_project(state, i, A, omega);
                charge.projection();
            }
            refresh_residual();
            const double relres = norm2(state.s) / vnorm;
            note_checkpoint(relres);
            if (relres == 0.0 || (stop_threshold > 0.0 && relres <= stop_threshold)) {
                result.reached_threshold = true;
                done = true;
            }
        }
    } else if (method.tag == InnerTag::RK) {
        RowSampler sampler(A);
        long next_check = static_cast<long>(m);
        while (state.projections < budget) {
            const index_t i = select_rk(rng, sampler);
            if (!maintain_via_gram) state.s[i] = v[i] - A.row_dot(i, state.z);
            kaczmarz_project(state, i, A, omega);
            charge.projection();
            if (maintain_via_gram) {
                residual_update(state, i, *C, omega);
                charge.residual();
            }
            maybe_refresh();
            if (state.projections >= next_check) {
                if (!maintain_via_gram) refresh_residual();
                const double relres = norm2(state.s) / vnorm;
                note_checkpoint(relres);
                next_check = state.projections + (maintain_via_gram ? 1 : static_cast<long>(m));
                if (relres == 0.0 || (stop_threshold > 0.0 && relres <= stop_threshold)) {
                    result.reached_threshold = true;
                    break;
                }
            }
        }
    } else {  // GK or GRK
        while (true) {
            if (!maintain_via_gram) refresh_residual();
            const double relres = norm2(state.s) / vnorm;
            if (state.projections > 0) {
                // the threshold test starts after one full sweep's worth of
                // projections so a loose early threshold cannot hand back a
                // single-row z; an exactly solved system stops immediately
                const bool testable = state.projections >= static_cast<long>(m);
                if (testable) note_checkpoint(relres);
                if (relres == 0.0 || (testable && stop_threshold > 0.0 && relres <= stop_threshold)) {
                    result.reached_threshold = true;
                    break;
                }
            }
            if (state.projections >= budget) break;
            if (!maintain_via_gram) charge.selection();
            const index_t i =
                method.tag == InnerTag::GK ? select_gk(state.s) : select_grk(rng, state, A);
            kaczmarz_project(state, i, A, omega);
            charge.projection();
            if (maintain_via_gram) {
                residual_update(state, i, *C, omega);
                charge.residual();
                maybe_refresh();
            }
        }
    }

    result.projections_used = state.projections;
    refresh_residual();
    result.final_residual_norm = norm2(state.s);
    result.z = std::move(state.z);
    return result;
}

}  // namespace flexkacz
