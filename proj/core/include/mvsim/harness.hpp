#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mvsim/analysis.hpp"
#include "mvsim/config.hpp"
#include "mvsim/engine.hpp"
#include "mvsim/fixedpoint.hpp"

namespace mvsim {

// ---- configuration files -------------------------------------------------

/// Parses `key = value` lines ('#' starts a comment). Relative paths resolve against `base_dir`.
/// Throws ConfigError for unknown or duplicate keys and malformed values; does not validate ranges.
SimConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {},
                       std::vector<std::string>* warnings = nullptr);
SimConfig load_config(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const SimConfig& cfg);

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_digest(const SimConfig& cfg);

/// Keys whose canonical values differ between a and b.
std::vector<std::string> config_field_diff(const SimConfig& a, const SimConfig& b);

// ---- presets -------------------------------------------------------------

enum class Scale { paper, desk };

Scale parse_scale(std::string_view s);
const std::vector<std::string>& preset_names();

/// Materializes a named experiment. Throws ConfigError for unknown names.
SimConfig make_preset(std::string_view name, Scale scale, std::uint64_t seed);

/// Keys that desk scale is allowed to change relative to paper scale.
const std::vector<std::string>& desk_override_fields();

// ---- experiments ---------------------------------------------------------

struct RateExperiment {
    RateReport report;
    std::optional<LossPath> reference;
    std::vector<std::optional<LossPath>> runs;  // one per eps; empty when that run failed
    std::vector<Diagnostics> diagnostics;       // reference first, then one per eps
};

/// Reference instantaneous run plus one delayed run per eps, errors = sup over [0, t_max].
RateExperiment run_rate_experiment(const SimConfig& cfg, const RunOptions& opt = {});

RateExperiment run_preset(std::string_view name, Scale scale, std::uint64_t seed, const RunOptions& opt = {});

// ---- outputs -------------------------------------------------------------

struct EmitOptions {
    bool plot = true;
};

/// report.json, rate.csv and runs/*.csv (when there are runs), rate.svg (plot and nonempty),
/// timing.json with wall-clock fields (the only non-deterministic file).
void emit_outputs(const RateExperiment& exp, const std::filesystem::path& dir, const EmitOptions& opt = {});

void write_loss_csv(const LossPath& loss, const std::filesystem::path& file);
std::string report_json(const RateReport& report);
std::string diagnostics_json(const Diagnostics& d);
std::string fixpoint_json(const FixpointReport& rep);
void write_iterates_csv(const FixpointReport& rep, const std::filesystem::path& file);
std::string rate_svg(const RateReport& report);
void write_text(const std::filesystem::path& file, const std::string& content);

}  // namespace mvsim
