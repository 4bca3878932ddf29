#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mvsim {

/// Uniform time grid t_k = k * dt, k = 0..n_steps.
class TimeGrid {
  public:
    TimeGrid(double dt, std::size_t n_steps);

    /// Grid with step `dt` covering [0, t_max]; t_max must be a whole number of steps
    /// up to a relative 1e-12.
    static TimeGrid from_horizon(double dt, double t_max);

    double dt() const noexcept { return dt_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    std::size_t size() const noexcept { return n_steps_ + 1; }
    double t_max() const noexcept { return static_cast<double>(n_steps_) * dt_; }
    double time(std::size_t k) const noexcept { return static_cast<double>(k) * dt_; }
    std::vector<double> times() const;

    /// Largest k with time(k) <= t (clamped to [0, n_steps]).
    std::size_t index_at_or_before(double t) const noexcept;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

  private:
    double dt_;
    std::size_t n_steps_;
};

/// Nondecreasing [0,1]-valued path on a grid; value k is L at t_k and L_{0-} = 0.
class LossPath {
  public:
    /// Validating constructor; throws MonotonicityError / RangeError, never clamps.
    static LossPath make(const TimeGrid& grid, std::vector<double> values);
    static LossPath zero(const TimeGrid& grid);

    const TimeGrid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t k) const noexcept { return values_[k]; }
    double back() const noexcept { return values_.back(); }

    friend bool operator==(const LossPath&, const LossPath&) = default;

  private:
    LossPath(const TimeGrid& grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values)) {}

    TimeGrid grid_;
    std::vector<double> values_;
};

LossPath make_loss_path(const TimeGrid& grid, std::vector<double> values);

/// Throws GridMismatch unless both grids are identical.
void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* where);

/// Pointwise a[k] <= b[k] for all k (exact comparison).
bool pointwise_leq(const LossPath& a, const LossPath& b) noexcept;

}  // namespace mvsim
