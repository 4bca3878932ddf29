#include "mvsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mvsim/text.hpp"

namespace mvsim {

std::optional<double> InitialLaw::boundary_exponent() const noexcept {
    if (kind == Kind::gamma && p1 - 1.0 > 0.0 && p1 - 1.0 < 1.0) return p1 - 1.0;
    return std::nullopt;
}

std::string InitialLaw::name() const {
    switch (kind) {
        case Kind::uniform:
            return "uniform(" + text::format_short(p1) + "," + text::format_short(p2) + ")";
        case Kind::gamma:
            return "gamma(" + text::format_short(p1) + "," + text::format_short(p2) + ")";
        case Kind::dirac: return "dirac(" + text::format_short(p1) + ")";
    }
    return "unknown";
}

std::string NoiseSpec::name() const {
    switch (kind) {
        case Kind::none: return "none";
        case Kind::random: return "random";
        case Kind::bridge: return "bridge(" + text::format_short(endpoint) + ")";
        case Kind::replay: return "replay";
    }
    return "unknown";
}

std::string to_string(FeedbackMode m) {
    switch (m) {
        case FeedbackMode::instantaneous: return "instantaneous";
        case FeedbackMode::delayed_sampled: return "delayed_sampled";
        case FeedbackMode::delayed_conv: return "delayed_conv";
    }
    return "unknown";
}

std::string to_string(Coupling c) { return c == Coupling::shared ? "shared" : "independent"; }

FeedbackMode parse_feedback_mode(std::string_view s) {
    s = text::trim(s);
    if (s == "instantaneous") return FeedbackMode::instantaneous;
    if (s == "delayed_sampled") return FeedbackMode::delayed_sampled;
    if (s == "delayed_conv") return FeedbackMode::delayed_conv;
    throw ConfigError("unknown feedback mode '" + std::string(s) + "'");
}

Coupling parse_coupling(std::string_view s) {
    s = text::trim(s);
    if (s == "shared") return Coupling::shared;
    if (s == "independent") return Coupling::independent;
    throw ConfigError("unknown coupling '" + std::string(s) + "'");
}

namespace {

std::string probe_label(double t, double x) {
    std::ostringstream os;
    os << "t=" << t << " x=" << x;
    return os.str();
}

void check_initial(const InitialLaw& law, std::vector<ConfigViolation>& out) {
    switch (law.kind) {
        case InitialLaw::Kind::uniform:
            if (!(law.p1 > 0.0 && law.p2 > law.p1 && std::isfinite(law.p2)))
                out.push_back({"initial.uniform requires 0 < a < b", {}});
            break;
        case InitialLaw::Kind::gamma:
            if (!(law.p1 > 0.0 && law.p2 > 0.0 && std::isfinite(law.p1) && std::isfinite(law.p2)))
                out.push_back({"initial.gamma requires shape > 0 and scale > 0", {}});
            break;
        case InitialLaw::Kind::dirac:
            if (!(law.p1 > 0.0 && std::isfinite(law.p1)))
                out.push_back({"initial.dirac requires c > 0", {}});
            break;
    }
}

}  // namespace

std::vector<ConfigViolation> check_config(const SimConfig& cfg) {
    std::vector<ConfigViolation> out;
    const auto& co = cfg.coefficients;

    if (cfg.n_particles < 1) out.push_back({"n_particles >= 1", {}});
    if (!(co.c_b > 0.0) || !(co.c_sigma >= 1.0) || !(co.c_rho >= 1.0))
        out.push_back({"bounds: C_b > 0, C_sigma >= 1, C_rho >= 1", {}});

    // Probe grid: 10 times x 10 positions; a separate fine time grid for alpha monotonicity.
    const double t_max = cfg.grid.t_max();
    constexpr double xs[] = {-1.0, -0.1, 0.0, 0.05, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0};
    constexpr double probe_moment = 0.5;
    bool drift_bad = false;
    bool sigma_bad = false;
    for (int it = 0; it < 10; ++it) {
        const double t = t_max * it / 9.0;
        for (double x : xs) {
            if (!drift_bad) {
                const double b = co.b(t, x, probe_moment);
                if (!std::isfinite(b) || std::abs(b) > co.c_b * (1.0 + std::abs(x) + probe_moment)) {
                    out.push_back({"|b| <= C_b (1 + |x| + m)", probe_label(t, x)});
                    drift_bad = true;
                }
            }
            if (!sigma_bad) {
                const double s = co.sigma(t, x);
                if (!(s >= 1.0 / co.c_sigma && s <= co.c_sigma)) {
                    out.push_back({"non-degeneracy: 1/C_sigma <= sigma <= C_sigma", probe_label(t, x)});
                    sigma_bad = true;
                }
            }
        }
    }

    bool rho_bad = false;
    bool alpha_neg = false;
    bool alpha_dec = false;
    double prev_alpha = co.alpha(0.0);
    for (int it = 0; it <= 200; ++it) {
        const double t = t_max * it / 200.0;
        const double r = co.rho(t);
        if (!rho_bad && !(r >= 0.0 && r <= 1.0 - 1.0 / co.c_rho)) {
            out.push_back({"0 <= rho <= 1 - 1/C_rho", probe_label(t, 0.0)});
            rho_bad = true;
        }
        const double a = co.alpha(t);
        if (!alpha_neg && !(a >= 0.0 && std::isfinite(a))) {
            out.push_back({"alpha >= 0", probe_label(t, 0.0)});
            alpha_neg = true;
        }
        if (!alpha_dec && a < prev_alpha) {
            out.push_back({"alpha nondecreasing", probe_label(t, 0.0)});
            alpha_dec = true;
        }
        prev_alpha = a;
    }

    check_initial(cfg.initial, out);

    switch (cfg.noise.kind) {
        case NoiseSpec::Kind::bridge:
            if (!std::isfinite(cfg.noise.endpoint)) out.push_back({"common_noise.endpoint finite", {}});
            break;
        case NoiseSpec::Kind::replay:
            if (cfg.noise.replay.size() != cfg.grid.size())
                out.push_back({"common_noise replay length matches grid", {}});
            else if (cfg.noise.replay.front() != 0.0)
                out.push_back({"common_noise replay starts at 0", {}});
            break;
        default: break;
    }

    for (double e : cfg.eps_ladder)
        if (!(e > 0.0) || !std::isfinite(e)) {
            out.push_back({"eps_ladder strictly positive", {}});
            break;
        }
    if (cfg.feedback_mode != FeedbackMode::instantaneous && !cfg.eps_ladder.empty()) {
        const double eps_min = *std::min_element(cfg.eps_ladder.begin(), cfg.eps_ladder.end());
        if (eps_min > 0.0 && cfg.grid.dt() > eps_min / 10.0 * (1.0 + 1e-12))
            out.push_back({"discretisation: dt <= min(eps)/10", "dt=" + text::format_short(cfg.grid.dt())});
    }
    return out;
}

const SimConfig& validate_config(const SimConfig& cfg) {
    auto violations = check_config(cfg);
    if (!violations.empty()) throw ConfigError(std::move(violations));
    return cfg;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    if (count == 0) return {};
    if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError("log_spaced requires 0 < lo <= hi");
    if (count == 1) return {lo};
    std::vector<double> out(count);
    const double a = std::log(lo);
    const double step = (std::log(hi) - a) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = std::exp(a + step * static_cast<double>(i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

}  // namespace mvsim
