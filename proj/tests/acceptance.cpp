// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvsim/analysis.hpp"
#include "mvsim/engine.hpp"
#include "mvsim/fixedpoint.hpp"
#include "mvsim/harness.hpp"
#include "mvsim/kernels.hpp"
#include "mvsim/stochastics.hpp"

using namespace mvsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> check;
};

fs::path g_out;
unsigned g_threads = 1;
std::uint64_t g_seed = 1;

std::string fmt(const char* f, auto... xs) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, xs...);
    return buf;
}

std::string join(const std::vector<double>& xs) {
    std::string s;
    for (double x : xs) s += (s.empty() ? "" : " ") + fmt("%.4g", x);
    return s;
}

Outcome rate_band(const std::string& preset, double lo, double hi, bool need_monotone) {
    auto exp = run_preset(preset, Scale::desk, g_seed, {g_threads});
    if (!g_out.empty()) emit_outputs(exp, g_out / preset);
    const auto& r = exp.report;
    bool monotone = true;
    for (std::size_t i = 1; i < r.errors.size(); ++i) monotone = monotone && r.errors[i - 1] < r.errors[i];
    const bool in_band = r.fitted && r.slope >= lo && r.slope <= hi;
    Outcome o;
    o.pass = r.status == "ok" && in_band && (!need_monotone || monotone);
    o.detail = fmt("slope=%.4f r2=%.3f band=[%.1f, %.1f]", r.slope, r.r2, lo, hi);
    if (need_monotone) o.detail += monotone ? " errors strictly monotone" : " errors NOT monotone";
    o.detail += " errors=(" + join(r.errors) + ")";
    return o;
}

Outcome jump_detection() {
    SimConfig c;
    c.n_particles = 100000;
    c.grid = TimeGrid::from_horizon(1e-6, 5e-4);
    c.initial = InitialLaw::gamma(1.2, 0.5);
    c.coefficients.alpha = TimeFunction::constant(0.9);
    c.feedback_mode = FeedbackMode::instantaneous;
    c.seed = g_seed;
    validate_config(c);
    const auto run = run_instantaneous(c, FrozenNoise::draw(c), {g_threads});
    std::vector<double> inc;
    double max_inc = 0.0;
    std::size_t at = 0;
    for (std::size_t k = 1; k < run.loss.size(); ++k) {
        const double d = run.loss[k] - run.loss[k - 1];
        if (d > 0.0) inc.push_back(d);
        if (d > max_inc) {
            max_inc = d;
            at = k;
        }
    }
    if (inc.empty()) return {false, "no deaths"};
    std::nth_element(inc.begin(), inc.begin() + static_cast<std::ptrdiff_t>(inc.size() / 2), inc.end());
    double median = inc[inc.size() / 2];
    if (inc.size() % 2 == 0) {
        const double lower = *std::max_element(inc.begin(), inc.begin() + static_cast<std::ptrdiff_t>(inc.size() / 2));
        median = 0.5 * (median + lower);
    }
    const double ratio = max_inc / median;
    return {ratio >= 10.0, fmt("max increment %.4g at t=%.3g, median nonzero %.3g, ratio %.1f (need >= 10)",
                                max_inc, c.grid.time(at), median, ratio)};
}

Outcome cascade_oracle() {
    std::mt19937_64 gen(g_seed * 7919 + 1);
    std::size_t checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + gen() % 64;
        const std::size_t total = n + gen() % 4;
        const double alpha = std::uniform_real_distribution<double>(0.0, 3.0)(gen);
        std::vector<double> x(n);
        for (auto& v : x) {
            v = std::uniform_real_distribution<double>(-0.3, 1.5)(gen);
            // land some particles exactly on cascade thresholds
            if (gen() % 4 == 0) v = alpha * static_cast<double>(gen() % (total + 1)) / static_cast<double>(total);
        }
        CascadeResult slow;
        try {
            slow = brute_force_cascade(x, alpha, total);
        } catch (const std::logic_error& e) {
            return {false, fmt("certificate failed on instance %d", trial)};
        }
        const auto fast = resolve_cascade(x, alpha, total);
        if (fast.m != slow.m || fast.jump != slow.jump || fast.killed != slow.killed)
            return {false, fmt("mismatch on instance %d (m %zu vs %zu)", trial, fast.m, slow.m)};
        ++checked;
    }
    return {true, fmt("%zu instances identical", checked)};
}

SimConfig random_small_config(std::mt19937_64& gen) {
    SimConfig c;
    c.n_particles = 1000;
    c.grid = TimeGrid(1e-4, 100 + gen() % 200);
    c.coefficients.alpha = TimeFunction::constant(std::uniform_real_distribution<double>(0.0, 2.5)(gen));
    switch (gen() % 3) {
        case 0: c.initial = InitialLaw::gamma(std::uniform_real_distribution<double>(1.05, 2.5)(gen), 0.05); break;
        case 1: c.initial = InitialLaw::uniform(0.005, std::uniform_real_distribution<double>(0.03, 0.2)(gen)); break;
        default: c.initial = InitialLaw::gamma(1.2, 0.5); break;
    }
    if (gen() % 3 == 0) {
        c.noise = gen() % 2 ? NoiseSpec::random() : NoiseSpec::bridge(-0.5);
        c.coefficients.rho = TimeFunction::constant(std::uniform_real_distribution<double>(0.1, 0.6)(gen));
        c.coefficients.c_rho = 3.0;
    }
    if (gen() % 4 == 0) c.coefficients.b = Drift::constant(std::uniform_real_distribution<double>(-2.0, 2.0)(gen));
    c.seed = gen();
    return c;
}

Outcome monotonicity_suite() {
    std::mt19937_64 gen(g_seed * 104729 + 3);
    int fails[5] = {0, 0, 0, 0, 0};
    for (int trial = 0; trial < 50; ++trial) {
        const auto c = random_small_config(gen);
        const auto fz = FrozenNoise::draw(c);
        FixpointReport rep;
        try {
            rep = iterate_minimal(fz, c, std::nullopt, 0.0, 100000, {g_threads});
        } catch (const MonotonicityError&) {
            ++fails[0];
            continue;
        }
        for (std::size_t i = 1; i < rep.iterates.size(); ++i)
            if (!pointwise_leq(rep.iterates[i - 1], rep.iterates[i])) ++fails[0];

        const auto& fixed = rep.iterates.back();
        std::vector<double> lower(fixed.values().begin(), fixed.values().end());
        const double scale = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
        for (auto& v : lower) v *= scale;
        const auto l1 = make_loss_path(c.grid, lower);
        if (!pointwise_leq(gamma_apply(fz, l1, c), gamma_apply(fz, fixed, c))) ++fails[1];

        const double e1 = 40.0 * c.grid.dt();
        const double e2 = 10.0 * c.grid.dt();
        if (!pointwise_leq(gamma_eps_apply(fz, fixed, e1, c), gamma_apply(fz, fixed, c))) ++fails[2];

        const auto f1 = iterate_minimal(fz, c, e1, 0.0, 100000, {g_threads}).iterates.back();
        const auto f2 = iterate_minimal(fz, c, e2, 0.0, 100000, {g_threads}).iterates.back();
        if (!pointwise_leq(f1, f2) || !pointwise_leq(f2, fixed)) ++fails[3];

        if (!(fixed == run_instantaneous(c, fz, {g_threads}).loss)) ++fails[4];
    }
    const bool ok = std::all_of(std::begin(fails), std::end(fails), [](int f) { return f == 0; });
    return {ok, fmt("50 configs; violations (a)=%d (b)=%d (c)=%d (d)=%d (e)=%d", fails[0], fails[1], fails[2],
                    fails[3], fails[4])};
}

Outcome estimator_agreement() {
    const double eps = 1e-3;
    double worst = 0.0;
    double bound = 0.0;
    for (std::uint64_t s = 1; s <= 10; ++s) {
        auto c = make_preset("CC1", Scale::desk, g_seed + s - 1);
        c.eps_ladder = {eps};
        validate_config(c);
        const auto fz = FrozenNoise::draw(c);
        const auto a = run_delayed_sampled(c, fz, eps, {g_threads});
        const auto b = run_delayed_conv(c, fz, eps, {g_threads});
        worst = std::max(worst, sup_error(a.loss, b.loss, c.grid.t_max()));
        bound = 5.0 / std::sqrt(static_cast<double>(c.n_particles));
    }
    return {worst <= bound, fmt("worst sup difference over 10 seeds %.5f (bound %.5f)", worst, bound)};
}

Outcome gronwall_closed_forms() {
    double err = 0.0;
    err = std::max(err, std::abs(beta_function(1.0, 0.5) - 2.0));
    err = std::max(err, std::abs(beta_function(1.5, 0.5) - std::numbers::pi / 2.0));
    const auto c = gronwall_coefficients(1.0, 0.5, 3);
    err = std::max(err, std::abs(c[0] - 2.0));
    err = std::max(err, std::abs(c[1] - std::numbers::pi));
    err = std::max(err, std::abs(c[2] - 4.0 * std::numbers::pi / 3.0));
    const bool g0 = gronwall_bound({1.7, 0.0, 1.0, 0.5, 2.0, 1e-12}, 100).bound == 1.7;
    const bool t0 = gronwall_bound({1.7, 3.0, 1.0, 0.5, 0.0, 1e-12}, 100).bound == 1.7;
    return {err <= 1e-10 && g0 && t0, fmt("max abs error %.2e; g=0 exact: %s; t=0 exact: %s", err, g0 ? "yes" : "no",
                                          t0 ? "yes" : "no")};
}

Outcome rate_formula() {
    double worst = 0.0;
    const double ratio = std::pow(10.0, 0.25);
    for (double p : {0.5, 0.8144, 1.0, 1.0202}) {
        RateReport r;
        for (int i = 0; i < 5; ++i) {
            r.eps.push_back(1e-4 * std::pow(ratio, i));
            r.errors.push_back(0.37 * std::pow(r.eps.back(), p));
        }
        analyze_errors(r);
        worst = std::max(worst, std::abs(r.slope - p));
        for (double b : r.beta_n) worst = std::max(worst, std::abs(b - p));
    }
    const double table[6][9] = {
        {0.9395, 0.9596, 1.0348, 0.9428, 0.9649, 1.0884, 1.0954, 1.1309, 0.9805},
        {0.9315, 1.0231, 0.9101, 0.8885, 0.9012, 0.5896, 1.3951, 1.1744, 1.0025},
        {0.9195, 1.0594, 0.8032, 1.0674, 1.2587, 0.9238, 0.3265, 1.5408, 0.0566},
        {0.5304, 0.7907, 0.5235, 1.1918, 0.7092, 0.6909, 0.8841, 1.2225, 0.5127},
        {0.7646, 0.7054, 0.8223, 0.8060, 0.9489, 0.4754, 0.8792, 0.6219, 0.8243},
        {0.7258, 0.7915, 0.8005, 0.8219, 0.8305, 0.7787, 0.7749, 0.8241, 1.0809},
    };
    const auto ladder = log_spaced(1e-8, std::pow(10.0, 1.5) * 1e-8, 10);
    double table_worst = 0.0;
    for (const auto& row : table) {
        RateReport r;
        r.eps = ladder;
        r.errors = {1e-2};
        for (std::size_t i = 0; i < 9; ++i)
            r.errors.push_back(r.errors.back() * std::pow(ladder[i + 1] / ladder[i], row[i]));
        analyze_errors(r);
        for (std::size_t i = 0; i < 9; ++i) table_worst = std::max(table_worst, std::abs(r.beta_n[i] - row[i]));
    }
    return {worst <= 1e-12 && table_worst <= 1e-3,
            fmt("synthetic max deviation %.2e (<= 1e-12); table gradients max deviation %.2e (<= 1e-3)", worst,
                table_worst)};
}

Outcome zero_coupling_identity() {
    auto c = make_preset("CC1", Scale::desk, g_seed);
    c.n_particles = 20000;
    c.coefficients.alpha = TimeFunction::constant(0.0);
    const auto fz = FrozenNoise::draw(c);
    const auto inst = run_instantaneous(c, fz, {g_threads}).loss;
    bool same = true;
    for (double eps : c.eps_ladder) {
        same = same && run_delayed_sampled(c, fz, eps, {g_threads}).loss == inst;
        same = same && run_delayed_conv(c, fz, eps, {g_threads}).loss == inst;
    }
    return {same && inst.back() > 0.0,
            fmt("final loss %.4f; all modes bit-identical across %zu eps: %s", inst.back(), c.eps_ladder.size(),
                same ? "yes" : "no")};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const fs::path root = g_out.empty() ? fs::temp_directory_path() / "mvsim_acceptance" : g_out;
    const auto a = root / "determinism_t1";
    const auto b = root / "determinism_t4";
    fs::remove_all(a);
    fs::remove_all(b);
    emit_outputs(run_preset("CNC2", Scale::desk, g_seed, {1}), a);
    emit_outputs(run_preset("CNC2", Scale::desk, g_seed, {4}), b);
    std::size_t compared = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file() || e.path().filename() == "timing.json") continue;
        const auto rel = fs::relative(e.path(), a);
        if (!fs::exists(b / rel) || slurp(e.path()) != slurp(b / rel))
            return {false, "differs: " + rel.generic_string()};
        ++compared;
    }
    return {compared >= 8, fmt("CNC2 desk, 1 vs 4 workers: %zu files byte-identical", compared)};
}

Outcome kernel_statistics() {
    double worst_sum = 0.0;
    for (const auto& k : {Kernel::beta22(), Kernel::triangular()})
        for (double eps : {1e-4, 1.7e-4, 3.162e-4, 1e-3}) {
            const auto dk = discretize(k, eps, TimeGrid(1e-5, 100));
            worst_sum = std::max(worst_sum, std::abs(std::accumulate(dk.weights.begin(), dk.weights.end(), 0.0) - 1.0));
        }

    RngStream rng(g_seed, {0, StreamRole::misc});
    std::vector<double> d(100000);
    for (auto& x : d) x = sample_delay(Kernel::beta22(), 1.0, rng);
    std::sort(d.begin(), d.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double u = d[i];
        const double f = u * u * (3.0 - 2.0 * u);
        ks = std::max({ks, (i + 1.0) / d.size() - f, f - static_cast<double>(i) / d.size()});
    }

    const double shape = 1.2;
    const double scale = 0.5;
    const std::size_t n = 1000000;
    RngStream grng(g_seed, {1, StreamRole::misc});
    double s1 = 0.0;
    double s2 = 0.0;
    std::vector<double> g(n);
    for (auto& x : g) {
        x = sample_gamma(shape, scale, grng);
        s1 += x;
    }
    const double mean = s1 / n;
    for (double x : g) s2 += (x - mean) * (x - mean);
    const double var = s2 / (n - 1);
    const double true_mean = shape * scale;
    const double true_var = shape * scale * scale;
    const double mu4 = 3.0 * shape * (shape + 2.0) * std::pow(scale, 4);
    const double z_mean = std::abs(mean - true_mean) / std::sqrt(true_var / n);
    const double z_var = std::abs(var - true_var) / std::sqrt((mu4 - true_var * true_var) / n);
    const bool ok = worst_sum <= 1e-12 && ks <= 0.01 && z_mean <= 3.0 && z_var <= 3.0;
    return {ok, fmt("weight-sum error %.1e; delay KS %.4f (<= 0.01); gamma mean z=%.2f, variance z=%.2f (<= 3)",
                    worst_sum, ks, z_mean, z_var)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    std::string out;
    std::vector<int> only;
    app.add_option("--out", out, "Directory for experiment outputs");
    app.add_option("--threads", g_threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    app.add_option("--seed", g_seed, "Master seed for the rate experiments");
    app.add_option("--only", only, "Run only these criterion numbers");
    CLI11_PARSE(app, argc, argv);
    if (!out.empty()) {
        g_out = out;
        fs::create_directories(g_out);
    }

    const std::vector<Criterion> criteria = {
        {1, "CC1 desk rate", [] { return rate_band("CC1", 0.6, 1.3, true); }},
        {2, "DC1 desk rate", [] { return rate_band("DC1", 0.4, 1.2, false); }},
        {3, "CNC2 desk rate", [] { return rate_band("CNC2", 0.4, 1.2, false); }},
        {4, "jump detection", jump_detection},
        {5, "cascade oracle", cascade_oracle},
        {6, "monotonicity suite", monotonicity_suite},
        {7, "estimator agreement", estimator_agreement},
        {8, "Gronwall closed forms", gronwall_closed_forms},
        {9, "rate formula exactness", rate_formula},
        {10, "zero-coupling identity", zero_coupling_identity},
        {11, "determinism across workers", determinism},
        {12, "kernel and sampler statistics", kernel_statistics},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] %2d %-30s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(),
                    secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
