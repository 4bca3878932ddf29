// mvsim: command-line front end for the particle simulator.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mvsim/analysis.hpp"
#include "mvsim/engine.hpp"
#include "mvsim/fixedpoint.hpp"
#include "mvsim/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Globals {
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

mvsim::SimConfig load(const std::string& path, const Globals& g) {
    std::vector<std::string> warnings;
    auto cfg = mvsim::load_config(path, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    if (g.seed) cfg.seed = *g.seed;
    return cfg;
}

void write_timing(const std::filesystem::path& dir, double seconds) {
    nlohmann::ordered_json j;
    j["wall_time_s"] = seconds;
    mvsim::write_text(dir / "timing.json", j.dump(2) + "\n");
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw mvsim::IoError("cannot create output directory " + dir.string());
}

int cmd_simulate(const Globals& g, const std::string& config, const std::string& mode_name,
                 std::optional<double> eps, const std::string& out) {
    auto cfg = load(config, g);
    cfg.feedback_mode = mvsim::parse_feedback_mode(mode_name);
    double e = 0.0;
    if (cfg.feedback_mode != mvsim::FeedbackMode::instantaneous) {
        if (eps) {
            e = *eps;
        } else if (!cfg.eps_ladder.empty()) {
            e = cfg.eps_ladder.front();
        } else {
            throw mvsim::ConfigError("delayed modes need --eps or an eps ladder in the config");
        }
        auto check = cfg;
        check.eps_ladder = {e};
        mvsim::validate_config(check);
    } else {
        mvsim::validate_config(cfg);
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto frozen = mvsim::FrozenNoise::draw(cfg);
    const auto run = mvsim::run_mode(cfg, frozen, cfg.feedback_mode, e, {g.threads});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ensure_dir(out);
    mvsim::write_loss_csv(run.loss, std::filesystem::path(out) / "loss.csv");
    mvsim::write_text(std::filesystem::path(out) / "diagnostics.json", mvsim::diagnostics_json(run.diagnostics));
    write_timing(out, secs);
    std::cout << "final_loss " << run.diagnostics.final_loss << "  max_jump " << run.diagnostics.max_jump << " at t="
              << run.diagnostics.max_jump_time << "\n";
    return 0;
}

int report_rate(const mvsim::RateExperiment& exp, const std::string& out, bool plot) {
    mvsim::emit_outputs(exp, out, {plot});
    const auto& r = exp.report;
    for (std::size_t i = 0; i < r.eps.size(); ++i)
        std::printf("eps %-12.6g error %.6g\n", r.eps[i], r.errors[i]);
    if (r.fitted) std::printf("slope %.4f  intercept %.4f  r2 %.4f\n", r.slope, r.intercept, r.r2);
    for (const auto& n : r.notes) std::printf("note: %s\n", n.c_str());
    return r.status == "ok" ? 0 : kExitNumerical;
}

int cmd_rate(const Globals& g, const std::string& config, const std::string& out, bool plot) {
    const auto cfg = load(config, g);
    return report_rate(mvsim::run_rate_experiment(cfg, {g.threads}), out, plot);
}

int cmd_preset(const Globals& g, const std::string& name, const std::string& scale, std::uint64_t seed,
               const std::string& out, bool plot) {
    const auto cfg = mvsim::make_preset(name, mvsim::parse_scale(scale), g.seed.value_or(seed));
    ensure_dir(out);
    mvsim::write_text(std::filesystem::path(out) / "config.txt", mvsim::serialize_config(cfg));
    return report_rate(mvsim::run_rate_experiment(cfg, {g.threads}), out, plot);
}

int cmd_fixpoint(const Globals& g, const std::string& config, std::optional<double> eps, double tol,
                 std::size_t max_iter, const std::string& out) {
    auto cfg = load(config, g);
    if (eps) {
        auto check = cfg;
        check.feedback_mode = mvsim::FeedbackMode::delayed_conv;
        check.eps_ladder = {*eps};
        mvsim::validate_config(check);
    } else {
        mvsim::validate_config(cfg);
    }
    const auto frozen = mvsim::FrozenNoise::draw(cfg);
    ensure_dir(out);
    const std::filesystem::path dir(out);
    try {
        const auto rep = mvsim::iterate_minimal(frozen, cfg, eps, tol, max_iter, {g.threads});
        mvsim::write_iterates_csv(rep, dir / "iterates.csv");
        mvsim::write_text(dir / "fixpoint.json", mvsim::fixpoint_json(rep));
        std::printf("converged after %zu iterations, final loss %.6g\n", rep.n_iters, rep.iterates.back().back());
        return 0;
    } catch (const mvsim::FixpointNonConvergence& e) {
        mvsim::write_iterates_csv(e.report(), dir / "iterates.csv");
        mvsim::write_text(dir / "fixpoint.json", mvsim::fixpoint_json(e.report()));
        throw;
    }
}

int cmd_gronwall(const mvsim::GronwallParams& p, std::size_t max_terms) {
    const auto r = mvsim::gronwall_bound(p, max_terms);
    nlohmann::ordered_json j;
    j["bound"] = r.bound;
    j["terms"] = r.terms;
    const auto c = mvsim::gronwall_coefficients(p.alpha_t, p.beta_t, std::min<std::size_t>(r.terms, 10));
    j["coefficients"] = c;
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Particle simulator for contagious McKean-Vlasov systems"};
    app.require_subcommand(1);
    Globals g;
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "Override the master seed");
    app.add_option("--threads", g.threads, "Worker threads (results do not depend on this)")
        ->check(CLI::Range(1u, 1024u));

    std::string config, out, mode = "delayed_conv", scale = "desk", name;
    double eps_value = 0.0;
    double tol = 0.0;
    std::size_t max_iter = 1000;
    bool plot = false;
    std::uint64_t preset_seed = 1;

    auto* sim = app.add_subcommand("simulate", "Run one feedback mode and write loss.csv");
    sim->add_option("--config", config, "Config file")->required();
    sim->add_option("--mode", mode, "instantaneous | delayed_sampled | delayed_conv")->required();
    auto* sim_eps = sim->add_option("--eps", eps_value, "Delay scale");
    sim->add_option("--out", out, "Output directory")->required();

    auto* rate = app.add_subcommand("rate", "Convergence-rate experiment over the eps ladder");
    rate->add_option("--config", config, "Config file")->required();
    rate->add_option("--out", out, "Output directory")->required();
    rate->add_flag("--plot", plot, "Also write rate.svg");

    auto* fix = app.add_subcommand("fixpoint", "Monotone Picard iteration of the loss operator");
    fix->add_option("--config", config, "Config file")->required();
    auto* fix_eps = fix->add_option("--eps", eps_value, "Smooth the input with the eps-kernel");
    fix->add_option("--tol", tol, "Sup-distance stopping tolerance")->required();
    fix->add_option("--max-iter", max_iter, "Iteration budget")->required();
    fix->add_option("--out", out, "Output directory")->required();

    mvsim::GronwallParams gp;
    std::size_t max_terms = 10000;
    auto* gr = app.add_subcommand("gronwall", "Evaluate the Gronwall series bound");
    gr->add_option("--a", gp.a)->required();
    gr->add_option("--g", gp.g)->required();
    gr->add_option("--alpha-t", gp.alpha_t)->required();
    gr->add_option("--beta-t", gp.beta_t)->required();
    gr->add_option("--t", gp.t)->required();
    gr->add_option("--tol", gp.tol)->required();
    gr->add_option("--max-terms", max_terms);

    auto* pre = app.add_subcommand("preset", "Run a named experiment preset");
    pre->add_option("name", name, "CC1 | CC2 | DC1 | DC2 | CNC1 | CNC2")->required();
    pre->add_option("--scale", scale, "paper | desk");
    pre->add_option("--seed", preset_seed, "Master seed");
    pre->add_option("--out", out, "Output directory")->required();
    pre->add_flag("--plot", plot, "Also write rate.svg");

    CLI11_PARSE(app, argc, argv);
    if (seed_opt->count() > 0) g.seed = seed_value;

    try {
        if (sim->parsed())
            return cmd_simulate(g, config, mode, sim_eps->count() ? std::optional(eps_value) : std::nullopt, out);
        if (rate->parsed()) return cmd_rate(g, config, out, plot);
        if (fix->parsed())
            return cmd_fixpoint(g, config, fix_eps->count() ? std::optional(eps_value) : std::nullopt, tol, max_iter,
                                out);
        if (gr->parsed()) return cmd_gronwall(gp, max_terms);
        if (pre->parsed()) return cmd_preset(g, name, scale, preset_seed, out, plot);
    } catch (const mvsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        for (const auto& v : e.violations())
            std::cerr << "  " << v.constraint << (v.probe.empty() ? "" : " at " + v.probe) << "\n";
        return kExitConfig;
    } catch (const mvsim::DiscretisationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const mvsim::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const mvsim::DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const mvsim::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
