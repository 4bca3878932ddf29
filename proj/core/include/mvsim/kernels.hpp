#pragma once

#include <concepts>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mvsim/errors.hpp"
#include "mvsim/grid.hpp"

namespace mvsim {

/// A nonnegative unit-mass delay density supported in [0, 1].
///
/// Analytic kinds carry closed-form CDFs. Table kernels interpolate the
/// density linearly between breakpoints and are renormalized to unit mass.
class Kernel {
  public:
    enum class Kind { beta22, triangular, table };

    /// Beta(2,2): density 6t(1-t), CDF 3t^2 - 2t^3.
    static Kernel beta22();
    /// Density 2(1-t), CDF 2t - t^2.
    static Kernel triangular();
    /// Piecewise-linear density through (breakpoints[i], densities[i]).
    /// Warnings (renormalization, nonzero density at 0) are appended to `warnings`.
    static Kernel table(std::vector<double> breakpoints, std::vector<double> densities,
                        std::vector<std::string>* warnings = nullptr);

    Kind kind() const noexcept { return kind_; }
    std::string name() const;

    double pdf(double t) const noexcept;
    double cdf(double t) const noexcept;
    /// Inverse CDF; closed form for analytic kinds, bisection to 1e-12 for tables.
    double quantile(double u) const noexcept;
    /// Mass of the raw table before renormalization (1 for analytic kinds).
    double raw_mass() const noexcept { return raw_mass_; }

    std::span<const double> breakpoints() const noexcept { return breaks_; }
    std::span<const double> densities() const noexcept { return dens_; }

    friend bool operator==(const Kernel&, const Kernel&) = default;

  private:
    explicit Kernel(Kind kind) : kind_(kind) {}

    Kind kind_;
    std::vector<double> breaks_;
    std::vector<double> dens_;
    std::vector<double> cum_;  // CDF at each breakpoint
    double raw_mass_ = 1.0;
};

/// Two-column CSV (breakpoint, density); an optional non-numeric header line is skipped.
Kernel load_table_kernel(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

double kernel_pdf(const Kernel& k, double t) noexcept;

/// eps^-1 * kernel_pdf(k, t / eps). Throws DomainError for eps <= 0.
double rescaled_pdf(const Kernel& k, double eps, double t);
double rescaled_cdf(const Kernel& k, double eps, double t);

/// Cell masses of the eps-rescaled kernel on a time grid.
struct DiscretizedKernel {
    double eps = 0.0;
    double dt = 0.0;
    /// weights[j] multiplies the loss at lag j (time t_k - j*dt).
    std::vector<double> weights;

    std::size_t max_lag() const noexcept { return weights.empty() ? 0 : weights.size() - 1; }
    double max_weight() const noexcept;

    /// sum_j w_j * values[k - j] with values before index 0 equal to 0, clamped to values[k].
    double smoothed_at(std::span<const double> values, std::size_t k) const noexcept;
};

/// Throws DomainError for eps <= 0 and DiscretisationError when grid.dt > eps / 10.
DiscretizedKernel discretize(const Kernel& k, double eps, const TimeGrid& grid);

/// Delayed loss: output[k] = sum_j w_j * loss[k - j] with L_{0-} = 0.
LossPath convolve_loss(const DiscretizedKernel& dk, const LossPath& loss);

template <class U>
concept UniformSource = requires(U& u) {
    { u.uniform() } -> std::convertible_to<double>;
};

inline double median_of_three(double a, double b, double c) noexcept {
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    return a > b ? a : b;
}

/// Delay with density kernel_pdf on [0, 1]; beta22 uses the median of three uniforms.
template <UniformSource U>
double sample_unit_delay(const Kernel& k, U& rng) {
    if (k.kind() == Kernel::Kind::beta22) {
        const double a = rng.uniform();
        const double b = rng.uniform();
        const double c = rng.uniform();
        return median_of_three(a, b, c);
    }
    return k.quantile(rng.uniform());
}

/// Delay with density kappa^eps on [0, eps].
template <UniformSource U>
double sample_delay(const Kernel& k, double eps, U& rng) {
    if (!(eps > 0.0)) throw DomainError("sample_delay: eps must be positive");
    return eps * sample_unit_delay(k, rng);
}

}  // namespace mvsim
