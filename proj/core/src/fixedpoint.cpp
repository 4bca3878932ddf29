#include "mvsim/fixedpoint.hpp"

#include "mvsim/analysis.hpp"
#include "mvsim/kernels.hpp"

namespace mvsim {

FixpointNonConvergence::FixpointNonConvergence(FixpointReport report, std::size_t budget)
    : NonConvergence("fixed-point iteration did not converge within " + std::to_string(budget) + " iterations",
                     budget),
      report_(std::move(report)) {}

LossPath gamma_apply(const FrozenNoise& frozen, const LossPath& ell, const SimConfig& cfg, const RunOptions& opt) {
    require_same_grid(ell.grid(), cfg.grid, "gamma_apply");
    return run_driven(cfg, frozen, ell, opt).loss;
}

LossPath gamma_eps_apply(const FrozenNoise& frozen, const LossPath& ell, double eps, const SimConfig& cfg,
                         const RunOptions& opt) {
    require_same_grid(ell.grid(), cfg.grid, "gamma_eps_apply");
    const auto dk = discretize(cfg.kernel, eps, cfg.grid);
    return gamma_apply(frozen, convolve_loss(dk, ell), cfg, opt);
}

FixpointReport iterate_minimal(const FrozenNoise& frozen, const SimConfig& cfg, std::optional<double> eps,
                               double tol, std::size_t max_iter, const RunOptions& opt) {
    if (!(tol >= 0.0)) throw DomainError("iterate_minimal: tol must be nonnegative");
    std::optional<DiscretizedKernel> dk;
    if (eps) dk = discretize(cfg.kernel, *eps, cfg.grid);

    FixpointReport rep;
    rep.iterates.push_back(LossPath::zero(cfg.grid));
    while (rep.n_iters < max_iter) {
        const LossPath& cur = rep.iterates.back();
        LossPath next = dk ? gamma_apply(frozen, convolve_loss(*dk, cur), cfg, opt) : gamma_apply(frozen, cur, cfg, opt);
        for (std::size_t k = 0; k < next.size(); ++k)
            if (next[k] < cur[k]) throw MonotonicityError(k);
        ++rep.n_iters;
        rep.final_gap_sup = sup_error(next, cur, cfg.grid.t_max());
        rep.final_gap_levy = levy_metric(next, cur);
        rep.iterates.push_back(std::move(next));
        if (rep.final_gap_sup <= tol) {
            rep.converged = true;
            return rep;
        }
    }
    throw FixpointNonConvergence(std::move(rep), max_iter);
}

}  // namespace mvsim
