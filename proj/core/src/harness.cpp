#include "mvsim/harness.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "mvsim/random.hpp"
#include "mvsim/text.hpp"

namespace mvsim {

// ---- presets -------------------------------------------------------------

namespace {

struct PresetRow {
    const char* name;
    InitialLaw initial;
    double alpha;
    double dt;
    double t_max;
    double rho;
    NoiseSpec noise;
    double desk_dt;
    double desk_t_max;
};

const std::vector<PresetRow>& preset_rows() {
    static const std::vector<PresetRow> rows = {
        {"CC1", InitialLaw::uniform(0.25, 0.35), 0.5, 1e-6, 0.1, 0.0, NoiseSpec::none(), 1e-5, 0.05},
        {"CC2", InitialLaw::gamma(2.1, 0.5), 1.3, 1e-6, 0.1, 0.0, NoiseSpec::none(), 1e-5, 0.05},
        {"DC1", InitialLaw::gamma(1.2, 0.5), 0.9, 1e-9, 1e-4, 0.0, NoiseSpec::none(), 1e-8, 5e-5},
        {"DC2", InitialLaw::gamma(1.4, 0.5), 2.0, 1e-9, 1e-4, 0.0, NoiseSpec::none(), 1e-8, 5e-5},
        {"CNC1", InitialLaw::uniform(0.25, 0.35), 0.5, 1e-6, 0.1, 0.5, NoiseSpec::bridge(1.0), 1e-5, 0.05},
        {"CNC2", InitialLaw::uniform(0.25, 0.35), 0.5, 1e-6, 2e-2, 0.5, NoiseSpec::bridge(-1.0), 1e-5, 2e-2},
    };
    return rows;
}

constexpr std::size_t kPaperParticles = 3162278;  // ceil(10^6.5)
constexpr std::size_t kDeskParticles = 100000;
constexpr std::size_t kPaperLadder = 10;
constexpr std::size_t kDeskLadder = 5;

}  // namespace

Scale parse_scale(std::string_view s) {
    s = text::trim(s);
    if (s == "paper") return Scale::paper;
    if (s == "desk") return Scale::desk;
    throw ConfigError("unknown scale '" + std::string(s) + "' (expected paper or desk)");
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& r : preset_rows()) v.emplace_back(r.name);
        return v;
    }();
    return names;
}

const std::vector<std::string>& desk_override_fields() {
    static const std::vector<std::string> f = {"n_particles", "dt", "t_max", "eps.list"};
    return f;
}

SimConfig make_preset(std::string_view name, Scale scale, std::uint64_t seed) {
    for (const auto& r : preset_rows()) {
        if (name != r.name) continue;
        SimConfig c;
        c.initial = r.initial;
        c.coefficients.alpha = TimeFunction::constant(r.alpha);
        c.coefficients.rho = TimeFunction::constant(r.rho);
        c.noise = r.noise;
        c.kernel = Kernel::beta22();
        c.feedback_mode = FeedbackMode::delayed_conv;
        c.coupling = Coupling::shared;
        c.seed = seed;
        if (scale == Scale::paper) {
            c.n_particles = kPaperParticles;
            c.grid = TimeGrid::from_horizon(r.dt, r.t_max);
            c.eps_ladder = log_spaced(10.0 * r.dt, std::pow(10.0, 2.5) * r.dt, kPaperLadder);
        } else {
            c.n_particles = kDeskParticles;
            c.grid = TimeGrid::from_horizon(r.desk_dt, r.desk_t_max);
            c.eps_ladder = log_spaced(10.0 * r.desk_dt, 100.0 * r.desk_dt, kDeskLadder);
        }
        return c;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

// ---- experiments ---------------------------------------------------------

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

RateExperiment run_rate_experiment(const SimConfig& cfg, const RunOptions& opt) {
    validate_config(cfg);
    if (cfg.eps_ladder.empty()) throw ConfigError("rate experiment requires a nonempty eps ladder");
    const FeedbackMode mode =
        cfg.feedback_mode == FeedbackMode::instantaneous ? FeedbackMode::delayed_conv : cfg.feedback_mode;

    RateExperiment exp;
    auto& rep = exp.report;
    rep.eps = cfg.eps_ladder;
    rep.seed = cfg.seed;
    rep.config_digest = config_digest(cfg);
    rep.mode = to_string(mode);
    if (cfg.feedback_mode == FeedbackMode::instantaneous)
        rep.notes.push_back("feedback_mode instantaneous has no eps; delayed_conv used for the ladder");

    const bool shared = cfg.coupling == Coupling::shared;
    std::optional<FrozenNoise> shared_noise;
    if (shared) shared_noise.emplace(FrozenNoise::draw(cfg));

    auto t0 = std::chrono::steady_clock::now();
    {
        const FrozenNoise fz = shared ? *shared_noise : FrozenNoise::draw(cfg, 0);
        auto ref = run_instantaneous(cfg, fz, opt);
        exp.reference = ref.loss;
        exp.diagnostics.push_back(ref.diagnostics);
    }
    rep.runtimes_s.push_back(seconds_since(t0));

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < cfg.eps_ladder.size(); ++i) {
        const double eps = cfg.eps_ladder[i];
        t0 = std::chrono::steady_clock::now();
        try {
            std::optional<FrozenNoise> own;
            if (!shared) own.emplace(FrozenNoise::draw(cfg, i + 1));
            const FrozenNoise& fz = shared ? *shared_noise : *own;
            auto run = run_mode(cfg, fz, mode, eps, opt);
            rep.errors.push_back(sup_error(*exp.reference, run.loss, cfg.grid.t_max()));
            exp.runs.emplace_back(std::move(run.loss));
            exp.diagnostics.push_back(run.diagnostics);
        } catch (const Error& e) {
            rep.errors.push_back(nan);
            exp.runs.emplace_back(std::nullopt);
            exp.diagnostics.push_back({});
            rep.status = "partial";
            rep.notes.push_back("run eps=" + text::format_short(eps) + " failed: " + e.what());
        }
        rep.runtimes_s.push_back(seconds_since(t0));
    }
    analyze_errors(rep);
    return exp;
}

RateExperiment run_preset(std::string_view name, Scale scale, std::uint64_t seed, const RunOptions& opt) {
    return run_rate_experiment(make_preset(name, scale, seed), opt);
}

// ---- outputs -------------------------------------------------------------

void write_text(const std::filesystem::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file.string());
    out << content;
    if (!out) throw IoError("write failed for " + file.string());
}

void write_loss_csv(const LossPath& loss, const std::filesystem::path& file) {
    std::string s = "t,L\n";
    for (std::size_t k = 0; k < loss.size(); ++k)
        s += text::format_double(loss.grid().time(k)) + "," + text::format_double(loss[k]) + "\n";
    write_text(file, s);
}

namespace {

nlohmann::ordered_json number_or_null(double x) {
    return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json numbers(const std::vector<double>& xs) {
    auto a = nlohmann::ordered_json::array();
    for (double x : xs) a.push_back(number_or_null(x));
    return a;
}

}  // namespace

std::string report_json(const RateReport& r) {
    nlohmann::ordered_json j;
    j["eps"] = numbers(r.eps);
    j["errors"] = numbers(r.errors);
    j["slope"] = r.fitted ? number_or_null(r.slope) : nlohmann::ordered_json(nullptr);
    j["intercept"] = r.fitted ? number_or_null(r.intercept) : nlohmann::ordered_json(nullptr);
    j["r2"] = r.fitted ? number_or_null(r.r2) : nlohmann::ordered_json(nullptr);
    j["beta_n"] = numbers(r.beta_n);
    j["seed"] = r.seed;
    j["config_digest"] = r.config_digest;
    j["mode"] = r.mode;
    j["status"] = r.status;
    j["notes"] = r.notes;
    j["rng"] = kRngMethod;
    j["normal_method"] = kNormalMethod;
    return j.dump(2) + "\n";
}

std::string diagnostics_json(const Diagnostics& d) {
    nlohmann::ordered_json j;
    j["max_jump"] = d.max_jump;
    j["max_jump_time"] = d.max_jump_time;
    j["final_loss"] = d.final_loss;
    j["n_dead"] = d.n_dead;
    return j.dump(2) + "\n";
}

std::string fixpoint_json(const FixpointReport& rep) {
    nlohmann::ordered_json j;
    j["n_iters"] = rep.n_iters;
    j["converged"] = rep.converged;
    j["final_gap_sup"] = rep.final_gap_sup;
    j["final_gap_levy"] = rep.final_gap_levy;
    j["final_loss"] = rep.iterates.empty() ? 0.0 : rep.iterates.back().back();
    return j.dump(2) + "\n";
}

void write_iterates_csv(const FixpointReport& rep, const std::filesystem::path& file) {
    std::string s = "t";
    for (std::size_t i = 0; i < rep.iterates.size(); ++i) s += ",iter_" + std::to_string(i);
    s += "\n";
    if (!rep.iterates.empty()) {
        const auto& grid = rep.iterates.front().grid();
        for (std::size_t k = 0; k < grid.size(); ++k) {
            s += text::format_double(grid.time(k));
            for (const auto& it : rep.iterates) s += "," + text::format_double(it[k]);
            s += "\n";
        }
    }
    write_text(file, s);
}

std::string rate_svg(const RateReport& r) {
    constexpr double w = 480.0;
    constexpr double h = 360.0;
    constexpr double m = 50.0;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < r.eps.size(); ++i)
        if (i < r.errors.size() && r.errors[i] > 0.0) pts.emplace_back(std::log10(r.eps[i]), std::log10(r.errors[i]));

    auto num = [](double x) { return text::format_short(x); };
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"360\" viewBox=\"0 0 480 360\">\n";
    s += "<rect width=\"480\" height=\"360\" fill=\"white\"/>\n";
    s += "<line x1=\"50\" y1=\"310\" x2=\"450\" y2=\"310\" stroke=\"black\"/>\n";
    s += "<line x1=\"50\" y1=\"310\" x2=\"50\" y2=\"30\" stroke=\"black\"/>\n";
    s += "<text x=\"250\" y=\"345\" text-anchor=\"middle\" font-size=\"12\">log10 eps</text>\n";
    s += "<text x=\"15\" y=\"170\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 170)\">log10 error</text>\n";
    if (!pts.empty()) {
        double x0 = pts.front().first, x1 = x0, y0 = pts.front().second, y1 = y0;
        for (auto [x, y] : pts) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
        // Fit is in natural logs; on log10 axes the slope is unchanged and the intercept scales.
        const double b10 = r.intercept / std::log(10.0);
        if (r.fitted) {
            y0 = std::min({y0, b10 + r.slope * x0, b10 + r.slope * x1});
            y1 = std::max({y1, b10 + r.slope * x0, b10 + r.slope * x1});
        }
        if (x1 - x0 < 1e-12) {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if (y1 - y0 < 1e-12) {
            y0 -= 0.5;
            y1 += 0.5;
        }
        auto px = [&](double x) { return m + (x - x0) / (x1 - x0) * (w - 2 * m); };
        auto py = [&](double y) { return h - m - (y - y0) / (y1 - y0) * (h - 2 * m - 10.0); };
        s += "<text x=\"50\" y=\"325\" font-size=\"10\">" + num(x0) + "</text>\n";
        s += "<text x=\"450\" y=\"325\" font-size=\"10\" text-anchor=\"end\">" + num(x1) + "</text>\n";
        s += "<text x=\"45\" y=\"310\" font-size=\"10\" text-anchor=\"end\">" + num(y0) + "</text>\n";
        s += "<text x=\"45\" y=\"45\" font-size=\"10\" text-anchor=\"end\">" + num(y1) + "</text>\n";
        if (r.fitted) {
            s += "<line x1=\"" + num(px(x0)) + "\" y1=\"" + num(py(b10 + r.slope * x0)) + "\" x2=\"" + num(px(x1)) +
                 "\" y2=\"" + num(py(b10 + r.slope * x1)) + "\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n";
            s += "<text x=\"60\" y=\"25\" font-size=\"12\">slope " + num(r.slope) + "</text>\n";
        }
        for (auto [x, y] : pts)
            s += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"3.5\" fill=\"firebrick\"/>\n";
    }
    s += "</svg>\n";
    return s;
}

void emit_outputs(const RateExperiment& exp, const std::filesystem::path& dir, const EmitOptions& opt) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());
    const auto& rep = exp.report;
    write_text(dir / "report.json", report_json(rep));

    nlohmann::ordered_json timing;
    timing["runtimes_s"] = rep.runtimes_s;
    double total = 0.0;
    for (double t : rep.runtimes_s) total += t;
    timing["wall_time_s"] = total;
    write_text(dir / "timing.json", timing.dump(2) + "\n");

    if (!exp.reference || rep.eps.empty()) return;

    const auto runs_dir = dir / "runs";
    std::filesystem::create_directories(runs_dir, ec);
    if (ec) throw IoError("cannot create output directory " + runs_dir.string());
    write_loss_csv(*exp.reference, runs_dir / "loss_inst.csv");
    for (std::size_t i = 0; i < exp.runs.size(); ++i)
        if (exp.runs[i]) write_loss_csv(*exp.runs[i], runs_dir / ("loss_eps_" + std::to_string(i) + ".csv"));

    const auto& ref = *exp.reference;
    std::string s = "t,L_inst";
    for (std::size_t i = 0; i < exp.runs.size(); ++i)
        if (exp.runs[i]) s += ",L_eps_" + text::format_short(rep.eps[i]);
    s += "\n";
    for (std::size_t k = 0; k < ref.size(); ++k) {
        s += text::format_double(ref.grid().time(k)) + "," + text::format_double(ref[k]);
        for (const auto& run : exp.runs)
            if (run) s += "," + text::format_double((*run)[k]);
        s += "\n";
    }
    write_text(dir / "rate.csv", s);
    if (opt.plot) write_text(dir / "rate.svg", rate_svg(rep));
}

}  // namespace mvsim
