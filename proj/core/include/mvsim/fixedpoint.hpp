#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mvsim/engine.hpp"
#include "mvsim/errors.hpp"
#include "mvsim/grid.hpp"

namespace mvsim {

struct FixpointReport {
    std::vector<LossPath> iterates;  // iterates[0] is the zero path
    std::size_t n_iters = 0;
    bool converged = false;
    double final_gap_sup = 0.0;
    double final_gap_levy = 0.0;
};

/// Thrown when iterate_minimal exhausts its budget; carries the partial report.
class FixpointNonConvergence : public NonConvergence {
  public:
    FixpointNonConvergence(FixpointReport report, std::size_t budget);
    const FixpointReport& report() const noexcept { return report_; }

  private:
    FixpointReport report_;
};

/// Gamma[ell]: death-fraction path of the ensemble driven by the fixed loss input ell.
LossPath gamma_apply(const FrozenNoise& frozen, const LossPath& ell, const SimConfig& cfg,
                     const RunOptions& opt = {});

/// Gamma_eps[ell] = Gamma[kappa^eps * ell].
LossPath gamma_eps_apply(const FrozenNoise& frozen, const LossPath& ell, double eps, const SimConfig& cfg,
                         const RunOptions& opt = {});

/// Monotone Picard iteration from the zero path; stops when the sup gap is <= tol.
/// Throws MonotonicityError if an iterate decreases anywhere, FixpointNonConvergence on budget exhaustion.
FixpointReport iterate_minimal(const FrozenNoise& frozen, const SimConfig& cfg, std::optional<double> eps,
                               double tol, std::size_t max_iter, const RunOptions& opt = {});

}  // namespace mvsim
