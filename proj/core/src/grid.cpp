#include "mvsim/grid.hpp"

#include <cmath>
#include <string>

#include "mvsim/errors.hpp"

namespace mvsim {

ConfigError::ConfigError(std::vector<ConfigViolation> violations)
    : Error([&] {
          std::string msg = "invalid configuration:";
          for (const auto& v : violations) {
              msg += " [" + v.constraint;
              if (!v.probe.empty()) msg += " at " + v.probe;
              msg += "]";
          }
          return msg;
      }()),
      violations_(std::move(violations)) {}

ConfigError::ConfigError(std::string constraint, std::string probe)
    : ConfigError(std::vector<ConfigViolation>{{std::move(constraint), std::move(probe)}}) {}

MonotonicityError::MonotonicityError(std::size_t index)
    : Error("loss path decreases at index " + std::to_string(index)), index_(index) {}

RangeError::RangeError(std::size_t index)
    : Error("loss path value outside [0,1] at index " + std::to_string(index)), index_(index) {}

TimeGrid::TimeGrid(double dt, std::size_t n_steps) : dt_(dt), n_steps_(n_steps) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("grid.dt > 0");
    if (n_steps < 1) throw ConfigError("grid.n_steps >= 1");
}

TimeGrid TimeGrid::from_horizon(double dt, double t_max) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("grid.dt > 0");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("grid.t_max > 0");
    const double steps = std::round(t_max / dt);
    if (steps < 1.0) throw ConfigError("grid.n_steps >= 1");
    const auto n = static_cast<std::size_t>(steps);
    if (std::abs(t_max - static_cast<double>(n) * dt) > 1e-12 * t_max)
        throw ConfigError("grid.t_max = n_steps * dt");
    return TimeGrid(dt, n);
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> t(size());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = time(k);
    return t;
}

std::size_t TimeGrid::index_at_or_before(double t) const noexcept {
    if (!(t > 0.0)) return 0;
    auto k = static_cast<std::size_t>(std::min(std::floor(t / dt_), static_cast<double>(n_steps_)));
    while (k < n_steps_ && time(k + 1) <= t) ++k;
    while (k > 0 && time(k) > t) --k;
    return k;
}

LossPath LossPath::make(const TimeGrid& grid, std::vector<double> values) {
    if (values.size() != grid.size())
        throw GridMismatch("loss path length " + std::to_string(values.size()) +
                           " does not match grid size " + std::to_string(grid.size()));
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!(values[k] >= 0.0 && values[k] <= 1.0)) throw RangeError(k);
        if (k > 0 && values[k] < values[k - 1]) throw MonotonicityError(k);
    }
    return LossPath(grid, std::move(values));
}

LossPath LossPath::zero(const TimeGrid& grid) {
    return LossPath(grid, std::vector<double>(grid.size(), 0.0));
}

LossPath make_loss_path(const TimeGrid& grid, std::vector<double> values) {
    return LossPath::make(grid, std::move(values));
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* where) {
    if (!(a == b)) throw GridMismatch(std::string(where) + ": grids differ");
}

bool pointwise_leq(const LossPath& a, const LossPath& b) noexcept {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] > b[k]) return false;
    return true;
}

}  // namespace mvsim
