#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvsim/coefficients.hpp"
#include "mvsim/errors.hpp"
#include "mvsim/grid.hpp"
#include "mvsim/kernels.hpp"

namespace mvsim {

/// Law of the initial positions X_{0-}; all mass strictly positive.
struct InitialLaw {
    enum class Kind { uniform, gamma, dirac };

    Kind kind = Kind::dirac;
    double p1 = 1.0;  // uniform: a; gamma: shape k; dirac: c
    double p2 = 0.0;  // uniform: b; gamma: scale theta

    static InitialLaw uniform(double a, double b) { return {Kind::uniform, a, b}; }
    static InitialLaw gamma(double shape, double scale) { return {Kind::gamma, shape, scale}; }
    static InitialLaw dirac(double c) { return {Kind::dirac, c, 0.0}; }

    /// Exponent beta in V(x) <= C x^beta near 0, where it is known analytically.
    std::optional<double> boundary_exponent() const noexcept;
    std::string name() const;

    friend bool operator==(const InitialLaw&, const InitialLaw&) = default;
};

/// Common noise W^0 specification.
struct NoiseSpec {
    enum class Kind { none, random, bridge, replay };

    Kind kind = Kind::none;
    double endpoint = 0.0;       // bridge: W^0 at t_max
    std::string path;            // replay: source file (informational)
    std::vector<double> replay;  // replay: W^0 on the grid

    static NoiseSpec none() { return {}; }
    static NoiseSpec random() { return {Kind::random, 0.0, {}, {}}; }
    static NoiseSpec bridge(double z) { return {Kind::bridge, z, {}, {}}; }
    static NoiseSpec replay_values(std::vector<double> values, std::string source = {}) {
        return {Kind::replay, 0.0, std::move(source), std::move(values)};
    }
    std::string name() const;
};

enum class FeedbackMode { instantaneous, delayed_sampled, delayed_conv };
enum class Coupling { shared, independent };

std::string to_string(FeedbackMode m);
std::string to_string(Coupling c);
FeedbackMode parse_feedback_mode(std::string_view s);
Coupling parse_coupling(std::string_view s);

/// Full description of one experiment.
struct SimConfig {
    std::size_t n_particles = 1000;
    TimeGrid grid{1e-3, 100};
    CoefficientSet coefficients;
    InitialLaw initial = InitialLaw::uniform(0.25, 0.35);
    NoiseSpec noise;
    Kernel kernel = Kernel::beta22();
    FeedbackMode feedback_mode = FeedbackMode::delayed_conv;
    std::vector<double> eps_ladder;
    std::uint64_t seed = 1;
    Coupling coupling = Coupling::shared;
};

/// Every violated constraint, checked on a probe grid of at least 100 (t, x) points.
std::vector<ConfigViolation> check_config(const SimConfig& cfg);

/// Returns `cfg` unchanged when every constraint holds; throws ConfigError otherwise.
const SimConfig& validate_config(const SimConfig& cfg);

/// `count` points log-uniformly spaced in [lo, hi], both ends included.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

}  // namespace mvsim
