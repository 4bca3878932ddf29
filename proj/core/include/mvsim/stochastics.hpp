#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <vector>

#include "mvsim/config.hpp"
#include "mvsim/grid.hpp"
#include "mvsim/random.hpp"

namespace mvsim {

template <class R>
concept NormalSource = UniformSource<R> && requires(R& r) {
    { r.normal() } -> std::convertible_to<double>;
};

/// Gamma(shape, scale) by Marsaglia-Tsang squeeze/rejection; exact in distribution.
/// Shapes below 1 use X_k = X_{k+1} U^{1/k}.
template <NormalSource R>
double sample_gamma(double shape, double scale, R& rng) {
    if (shape < 1.0) {
        const double boosted = sample_gamma(shape + 1.0, 1.0, rng);
        return scale * boosted * std::pow(rng.uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return scale * d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return scale * d * v;
    }
}

/// One draw from the initial law.
template <NormalSource R>
double sample_initial_one(const InitialLaw& law, R& rng) {
    switch (law.kind) {
        case InitialLaw::Kind::uniform: return law.p1 + (law.p2 - law.p1) * rng.uniform();
        case InitialLaw::Kind::gamma: return sample_gamma(law.p1, law.p2, rng);
        case InitialLaw::Kind::dirac: return law.p1;
    }
    return law.p1;
}

/// n i.i.d. draws from one stream. Throws ConfigError for invalid law parameters.
std::vector<double> sample_initial(const InitialLaw& law, std::size_t n, RngStream& rng);

/// n draws where draw i uses its own substream (seed, {i, initial}); independent of ordering.
std::vector<double> sample_initial_per_particle(const InitialLaw& law, std::size_t n, std::uint64_t seed);

/// n_steps i.i.d. N(0, dt) increments.
std::vector<double> brownian_increments(const TimeGrid& grid, RngStream& rng);

/// W^0 on a grid; values[0] = 0.
struct CommonNoisePath {
    TimeGrid grid;
    std::vector<double> values;

    double increment(std::size_t k) const noexcept { return values[k] - values[k - 1]; }
};

/// none: zeros; random: Brownian path; bridge(z): B_t - (t/T) B_T + (t/T) z; replay: spec values.
CommonNoisePath common_noise_path(const NoiseSpec& spec, const TimeGrid& grid, RngStream& rng);

/// Reads a (t, w0) CSV that must match `grid` exactly (length and times to 1e-12 relative).
std::vector<double> load_replay_path(const std::filesystem::path& path, const TimeGrid& grid);

}  // namespace mvsim
