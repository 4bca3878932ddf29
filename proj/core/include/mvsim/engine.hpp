#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "mvsim/config.hpp"
#include "mvsim/grid.hpp"
#include "mvsim/random.hpp"
#include "mvsim/stochastics.hpp"

namespace mvsim {

inline constexpr std::uint32_t kAliveSentinel = std::numeric_limits<std::uint32_t>::max();

/// Every random input of a run, fixed up front so runs can be coupled pathwise.
///
/// Brownian increments are either explicit (small hand instances) or regenerated
/// on demand from per-particle counter-based streams, which keeps memory linear in N.
class FrozenNoise {
  public:
    /// Draws the noise for `cfg` from seed `cfg.seed` combined with `seed_component`.
    static FrozenNoise draw(const SimConfig& cfg, std::uint64_t seed_component = 0);

    /// Explicit noise: `increments` is particle-major (n x n_steps), already scaled by sqrt(dt).
    static FrozenNoise from_values(const TimeGrid& grid, std::vector<double> initial,
                                   std::vector<double> increments, std::vector<double> common_path = {},
                                   std::vector<double> base_delays = {});

    std::size_t size() const noexcept { return initial_.size(); }
    const TimeGrid& grid() const noexcept { return grid_; }
    std::uint64_t seed() const noexcept { return seed_; }

    std::span<const double> initial() const noexcept { return initial_; }
    const CommonNoisePath& common() const noexcept { return common_; }
    /// Unit-scale delays u_i; the delay at scale eps is eps * u_i.
    std::span<const double> base_delays() const noexcept { return base_delays_; }

    /// Idiosyncratic increment of particle i over (t_k, t_{k+1}].
    double increment(std::size_t i, std::size_t k) const noexcept {
        if (!explicit_.empty()) return explicit_[i * grid_.n_steps() + k];
        return sqrt_dt_ * counter_normal(keys_[i], k);
    }

  private:
    FrozenNoise(const TimeGrid& grid) : grid_(grid), common_{grid, {}} {}

    TimeGrid grid_;
    std::uint64_t seed_ = 0;
    double sqrt_dt_ = 0.0;
    std::vector<double> initial_;
    std::vector<std::uint64_t> keys_;
    std::vector<double> explicit_;
    CommonNoisePath common_;
    std::vector<double> base_delays_;
};

/// Particle state at the end of a run.
struct ParticleEnsemble {
    std::size_t n = 0;
    std::vector<double> positions;
    std::vector<bool> alive;
    std::vector<std::uint32_t> death_step;  // kAliveSentinel while alive
    std::vector<double> delays;             // delayed_sampled only
    double cum_feedback = 0.0;

    std::size_t n_dead() const noexcept;
    double loss_now() const noexcept { return n == 0 ? 0.0 : static_cast<double>(n_dead()) / static_cast<double>(n); }
};

struct Diagnostics {
    double max_jump = 0.0;
    double max_jump_time = 0.0;
    double final_loss = 0.0;
    std::size_t n_dead = 0;
    /// Sum over steps of alpha(t_k) times the feedback increment actually applied.
    double applied_feedback = 0.0;
};

struct RunResult {
    LossPath loss;
    Diagnostics diagnostics;
    ParticleEnsemble ensemble;
};

/// Worker count for the per-step parallel sections; results do not depend on it.
struct RunOptions {
    unsigned threads = 1;
};

struct CascadeResult {
    double jump = 0.0;                // m / n_total
    std::size_t m = 0;                // number killed
    std::vector<std::size_t> killed;  // indices into the input, ascending
};

/// Least fixed point of m -> #{v <= thr(m)} over ascending `sorted`, iterating from m = 0.
/// Returns nullopt once a threshold exceeds `limit` (the caller's candidate set is incomplete).
template <class Thr>
std::optional<std::size_t> cascade_fixed_point(std::span<const double> sorted, Thr&& thr,
                                               double limit = std::numeric_limits<double>::infinity()) {
    auto count = [&](double y) {
        return static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), y) - sorted.begin());
    };
    std::size_t m = 0;
    for (;;) {
        const double y = thr(m);
        if (y > limit) return std::nullopt;
        const std::size_t next = count(y);
        if (next == m) return m;
        m = next;
    }
}

/// Physical jump among alive positions: least m with m = #{X_i <= alpha m / n_total}.
CascadeResult resolve_cascade(std::span<const double> positions, double alpha, std::size_t n_total);

/// Definitional scan oracle for resolve_cascade. Throws std::logic_error if the
/// least-fixed-point certificate fails.
CascadeResult brute_force_cascade(std::span<const double> positions, double alpha, std::size_t n_total);

/// Sorted alive positions with n_total, for counting queries nu[0, y].
struct SubMeasure {
    std::vector<double> sorted;
    std::size_t n_total = 0;

    std::size_t count() const noexcept { return sorted.size(); }
    /// nu[0, y] = #{alive : X <= y} / n_total; all alive positions are positive.
    double mass_upto(double y) const noexcept;
};

SubMeasure empirical_sub_measure(const ParticleEnsemble& ens);

RunResult run_instantaneous(const SimConfig& cfg, const FrozenNoise& frozen, const RunOptions& opt = {});
RunResult run_delayed_sampled(const SimConfig& cfg, const FrozenNoise& frozen, double eps,
                              const RunOptions& opt = {});
RunResult run_delayed_conv(const SimConfig& cfg, const FrozenNoise& frozen, double eps,
                           const RunOptions& opt = {});

/// Dispatch on cfg.feedback_mode (eps ignored for instantaneous).
RunResult run_mode(const SimConfig& cfg, const FrozenNoise& frozen, FeedbackMode mode, double eps,
                   const RunOptions& opt = {});

/// Particle system driven by a fixed loss input: feedback -alpha(t_k) (ell[k] - ell[k-1]), ell[-1] = 0.
RunResult run_driven(const SimConfig& cfg, const FrozenNoise& frozen, const LossPath& ell,
                     const RunOptions& opt = {});

}  // namespace mvsim
