#include "mvsim/engine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mvsim/errors.hpp"
#include "mvsim/kernels.hpp"
#include "parallel.hpp"

namespace mvsim {

FrozenNoise FrozenNoise::draw(const SimConfig& cfg, std::uint64_t seed_component) {
    if (cfg.n_particles < 1) throw ConfigError("n_particles >= 1");
    FrozenNoise fz(cfg.grid);
    const std::uint64_t seed =
        seed_component == 0 ? cfg.seed : splitmix64_mix(cfg.seed ^ splitmix64_mix(seed_component * kGoldenGamma));
    const std::size_t n = cfg.n_particles;
    fz.seed_ = seed;
    fz.sqrt_dt_ = std::sqrt(cfg.grid.dt());
    fz.initial_ = sample_initial_per_particle(cfg.initial, n, seed);
    fz.keys_.resize(n);
    fz.base_delays_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        fz.keys_[i] = stream_key(seed, {i, StreamRole::increments});
        RngStream rng(seed, {i, StreamRole::delay});
        fz.base_delays_[i] = sample_unit_delay(cfg.kernel, rng);
    }
    RngStream common(seed, {0, StreamRole::common_noise});
    fz.common_ = common_noise_path(cfg.noise, cfg.grid, common);
    return fz;
}

FrozenNoise FrozenNoise::from_values(const TimeGrid& grid, std::vector<double> initial,
                                     std::vector<double> increments, std::vector<double> common_path,
                                     std::vector<double> base_delays) {
    const std::size_t n = initial.size();
    if (n < 1) throw ConfigError("FrozenNoise requires at least one particle");
    if (increments.size() != n * grid.n_steps())
        throw ConfigError("FrozenNoise increments must be n x n_steps");
    if (common_path.empty()) common_path.assign(grid.size(), 0.0);
    if (common_path.size() != grid.size()) throw ConfigError("FrozenNoise common path must match the grid");
    if (base_delays.empty()) base_delays.assign(n, 0.5);
    if (base_delays.size() != n) throw ConfigError("FrozenNoise base delays must have one entry per particle");
    FrozenNoise fz(grid);
    fz.sqrt_dt_ = std::sqrt(grid.dt());
    fz.initial_ = std::move(initial);
    fz.explicit_ = std::move(increments);
    fz.common_ = CommonNoisePath{grid, std::move(common_path)};
    fz.base_delays_ = std::move(base_delays);
    return fz;
}

std::size_t ParticleEnsemble::n_dead() const noexcept {
    return static_cast<std::size_t>(std::count(alive.begin(), alive.end(), false));
}

double SubMeasure::mass_upto(double y) const noexcept {
    if (n_total == 0) return 0.0;
    const auto c = std::upper_bound(sorted.begin(), sorted.end(), y) - sorted.begin();
    return static_cast<double>(c) / static_cast<double>(n_total);
}

SubMeasure empirical_sub_measure(const ParticleEnsemble& ens) {
    SubMeasure out;
    out.n_total = ens.n;
    for (std::size_t i = 0; i < ens.positions.size(); ++i)
        if (ens.alive[i]) out.sorted.push_back(ens.positions[i]);
    std::sort(out.sorted.begin(), out.sorted.end());
    return out;
}

namespace {

double cascade_threshold(double alpha, std::size_t m, std::size_t n_total) {
    return alpha * (static_cast<double>(m) / static_cast<double>(n_total));
}

}  // namespace

CascadeResult resolve_cascade(std::span<const double> positions, double alpha, std::size_t n_total) {
    if (n_total < 1) throw DomainError("resolve_cascade: n_total >= 1");
    std::vector<std::size_t> order(positions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return positions[a] < positions[b] || (positions[a] == positions[b] && a < b);
    });
    std::vector<double> sorted(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = positions[order[i]];

    CascadeResult r;
    r.m = *cascade_fixed_point(sorted, [&](std::size_t m) { return cascade_threshold(alpha, m, n_total); });
    r.jump = static_cast<double>(r.m) / static_cast<double>(n_total);
    r.killed.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(r.m));
    std::sort(r.killed.begin(), r.killed.end());
    return r;
}

CascadeResult brute_force_cascade(std::span<const double> positions, double alpha, std::size_t n_total) {
    if (n_total < 1) throw DomainError("brute_force_cascade: n_total >= 1");
    auto count_below = [&](double y) {
        std::size_t c = 0;
        for (double x : positions) c += x <= y ? 1 : 0;
        return c;
    };
    for (std::size_t m = 0;; ++m) {
        const double y = cascade_threshold(alpha, m, n_total);
        const std::size_t c = count_below(y);
        if (c > m) continue;
        if (c != m) throw std::logic_error("brute_force_cascade: least fixed point certificate failed");
        CascadeResult r;
        r.m = m;
        r.jump = static_cast<double>(m) / static_cast<double>(n_total);
        for (std::size_t i = 0; i < positions.size(); ++i)
            if (positions[i] <= y) r.killed.push_back(i);
        return r;
    }
}

namespace {

constexpr std::size_t kChunk = 4096;

enum class Drive { instantaneous, sampled, conv, driven };

struct Plan {
    Drive drive = Drive::instantaneous;
    double eps = 0.0;
    const LossPath* ell = nullptr;
};

/// Each particle carries `base` = X_{0-} plus accumulated drift and noise, and the
/// feedback enters through one global cumulative value: X = base - cum, death iff base <= cum.
RunResult simulate(const SimConfig& cfg, const FrozenNoise& fz, const Plan& plan, const RunOptions& opt) {
    const TimeGrid& grid = fz.grid();
    require_same_grid(cfg.grid, grid, "simulate");
    if (cfg.n_particles != fz.size())
        throw ConfigError("frozen noise has " + std::to_string(fz.size()) + " particles, config has " +
                          std::to_string(cfg.n_particles));
    if (plan.ell) require_same_grid(plan.ell->grid(), grid, "run_driven");

    const std::size_t n = fz.size();
    const std::size_t steps = grid.n_steps();
    const double dt = grid.dt();
    const auto& co = cfg.coefficients;
    const bool alpha_const = co.alpha.is_constant();
    const double alpha_c = co.alpha(0.0);
    const bool common_on = cfg.noise.kind != NoiseSpec::Kind::none;
    const bool state_dep = co.b.state_dependent() || co.sigma.state_dependent();
    const bool need_moment = co.b.needs_moment();

    DiscretizedKernel dk;
    if (plan.drive == Drive::conv) dk = discretize(cfg.kernel, plan.eps, grid);

    std::vector<double> base(fz.initial().begin(), fz.initial().end());
    std::vector<std::uint32_t> death(n, kAliveSentinel);
    const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
    std::vector<std::vector<std::uint32_t>> alive(n_chunks);
    for (std::size_t c = 0; c < n_chunks; ++c) {
        const std::size_t lo = c * kChunk;
        const std::size_t hi = std::min(n, lo + kChunk);
        alive[c].reserve(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) alive[c].push_back(static_cast<std::uint32_t>(i));
    }
    std::vector<std::vector<std::uint32_t>> died(n_chunks);
    std::vector<std::vector<std::pair<double, std::uint32_t>>> cand(n_chunks);
    std::vector<double> chunk_sum(n_chunks);
    std::vector<std::size_t> chunk_count(n_chunks);

    std::vector<double> loss(steps + 1, 0.0);
    std::vector<double> cum_hist(steps + 1, 0.0);
    std::vector<std::uint32_t> arrivals(plan.drive == Drive::sampled ? steps + 2 : 0, 0);
    std::size_t arrived = 0;

    const auto level = [n](std::size_t c) { return static_cast<double>(c) / static_cast<double>(n); };
    std::size_t n_dead = 0;
    std::size_t prev_m = 0;
    double cum = 0.0;
    double v_prev = 0.0;
    double applied = 0.0;
    const auto next_cum = [&](double a_k, double vp, double vn) {
        return alpha_const ? alpha_c * vn : cum + a_k * (vn - vp);
    };

    detail::WorkerTeam team(opt.threads);
    Diagnostics diag;

    for (std::size_t k = 0; k <= steps; ++k) {
        const double a_k = co.alpha(grid.time(k));
        const double t_prev = k > 0 ? grid.time(k - 1) : 0.0;

        double moment = 0.0;
        if (k > 0 && need_moment) {
            team.parallel_for(n_chunks, [&](std::size_t c) {
                double s = 0.0;
                std::size_t cnt = 0;
                for (std::uint32_t idx : alive[c]) {
                    if (death[idx] != kAliveSentinel) continue;
                    s += std::abs(base[idx] - cum);
                    ++cnt;
                }
                chunk_sum[c] = s;
                chunk_count[c] = cnt;
            });
            double s = 0.0;
            std::size_t cnt = 0;
            for (std::size_t c = 0; c < n_chunks; ++c) {
                s += chunk_sum[c];
                cnt += chunk_count[c];
            }
            moment = cnt > 0 ? s / static_cast<double>(cnt) : 0.0;
        }

        double rho = 0.0;
        double dw0 = 0.0;
        if (k > 0 && common_on) {
            rho = co.rho(t_prev);
            dw0 = fz.common().increment(k);
        }
        const double q = std::sqrt(1.0 - rho * rho);
        const double rdw0 = rho * dw0;
        const double bdt = k > 0 && !state_dep ? co.b(t_prev, 0.0, moment) * dt : 0.0;
        const double sig = k > 0 && !state_dep ? co.sigma(t_prev, 0.0) : 0.0;

        double v_k = 0.0;
        double cum_k = 0.0;
        double band = 0.0;
        const std::size_t n_alive = n - n_dead;
        switch (plan.drive) {
            case Drive::sampled:
                arrived += arrivals[k];
                v_k = level(arrived);
                break;
            case Drive::conv: v_k = k == 0 ? 0.0 : dk.smoothed_at(loss, k - 1); break;
            case Drive::driven: v_k = (*plan.ell)[k]; break;
            case Drive::instantaneous: {
                const std::size_t h = std::min(n_alive, std::max<std::size_t>(64, 2 * prev_m));
                band = next_cum(a_k, level(n_dead), level(n_dead + h));
                break;
            }
        }
        const bool inst = plan.drive == Drive::instantaneous;
        if (!inst) cum_k = next_cum(a_k, v_prev, v_k);

        team.parallel_for(n_chunks, [&](std::size_t c) {
            auto& al = alive[c];
            died[c].clear();
            cand[c].clear();
            std::size_t w = 0;
            for (std::uint32_t idx : al) {
                if (death[idx] != kAliveSentinel) continue;
                double b = base[idx];
                if (k > 0) {
                    const double dwi = fz.increment(idx, k - 1);
                    if (state_dep) {
                        const double x = b - cum;
                        b += co.b(t_prev, x, moment) * dt + co.sigma(t_prev, x) * (q * dwi + rdw0);
                    } else {
                        b += bdt + sig * (q * dwi + rdw0);
                    }
                    base[idx] = b;
                }
                if (inst) {
                    if (b <= band) cand[c].emplace_back(b, idx);
                    al[w++] = idx;
                } else if (b <= cum_k) {
                    died[c].push_back(idx);
                } else {
                    al[w++] = idx;
                }
            }
            al.resize(w);
        });

        std::size_t new_dead = 0;
        if (inst) {
            std::vector<std::pair<double, std::uint32_t>> pool;
            for (const auto& cc : cand) pool.insert(pool.end(), cc.begin(), cc.end());
            auto solve = [&](std::vector<std::pair<double, std::uint32_t>>& p, double limit) {
                std::sort(p.begin(), p.end());
                std::vector<double> vals(p.size());
                for (std::size_t i = 0; i < p.size(); ++i) vals[i] = p[i].first;
                const double l0 = level(n_dead);
                return cascade_fixed_point(
                    vals, [&](std::size_t m) { return next_cum(a_k, l0, level(n_dead + m)); }, limit);
            };
            auto m = solve(pool, band);
            if (!m) {
                pool.clear();
                for (const auto& al : alive)
                    for (std::uint32_t idx : al) pool.emplace_back(base[idx], idx);
                m = solve(pool, std::numeric_limits<double>::infinity());
            }
            new_dead = *m;
            for (std::size_t i = 0; i < new_dead; ++i) death[pool[i].second] = static_cast<std::uint32_t>(k);
            v_k = level(n_dead + new_dead);
            cum_k = next_cum(a_k, level(n_dead), v_k);
            applied += a_k * (v_k - level(n_dead));
            prev_m = new_dead;
        } else {
            for (const auto& dc : died) {
                for (std::uint32_t idx : dc) {
                    death[idx] = static_cast<std::uint32_t>(k);
                    if (plan.drive == Drive::sampled) {
                        const double s = grid.time(k) + plan.eps * fz.base_delays()[idx];
                        auto a = static_cast<std::size_t>(std::min(std::floor(s / dt), static_cast<double>(steps + 1)));
                        while (a <= steps && !(s < grid.time(a))) ++a;
                        while (a > 0 && s < grid.time(a - 1)) --a;
                        if (a <= steps) ++arrivals[a];
                    }
                }
                new_dead += dc.size();
            }
            applied += a_k * (v_k - v_prev);
        }
        cum = cum_k;
        v_prev = v_k;
        n_dead += new_dead;
        loss[k] = level(n_dead);
        cum_hist[k] = cum;

        const double jump = loss[k] - (k > 0 ? loss[k - 1] : 0.0);
        if (jump > diag.max_jump) {
            diag.max_jump = jump;
            diag.max_jump_time = grid.time(k);
        }
    }

    RunResult out{LossPath::make(grid, loss), {}, {}};
    diag.final_loss = loss.back();
    diag.n_dead = n_dead;
    diag.applied_feedback = applied;
    out.diagnostics = diag;

    auto& ens = out.ensemble;
    ens.n = n;
    ens.positions.resize(n);
    ens.alive.resize(n);
    ens.death_step = death;
    ens.cum_feedback = cum;
    for (std::size_t i = 0; i < n; ++i) {
        const bool a = death[i] == kAliveSentinel;
        ens.alive[i] = a;
        ens.positions[i] = base[i] - (a ? cum : cum_hist[death[i]]);
    }
    if (plan.drive == Drive::sampled) {
        ens.delays.resize(n);
        for (std::size_t i = 0; i < n; ++i) ens.delays[i] = plan.eps * fz.base_delays()[i];
    }
    return out;
}

}  // namespace

RunResult run_instantaneous(const SimConfig& cfg, const FrozenNoise& frozen, const RunOptions& opt) {
    return simulate(cfg, frozen, {Drive::instantaneous, 0.0, nullptr}, opt);
}

RunResult run_delayed_sampled(const SimConfig& cfg, const FrozenNoise& frozen, double eps, const RunOptions& opt) {
    if (!(eps > 0.0)) throw DomainError("run_delayed_sampled: eps must be positive");
    return simulate(cfg, frozen, {Drive::sampled, eps, nullptr}, opt);
}

RunResult run_delayed_conv(const SimConfig& cfg, const FrozenNoise& frozen, double eps, const RunOptions& opt) {
    return simulate(cfg, frozen, {Drive::conv, eps, nullptr}, opt);
}

RunResult run_mode(const SimConfig& cfg, const FrozenNoise& frozen, FeedbackMode mode, double eps,
                   const RunOptions& opt) {
    switch (mode) {
        case FeedbackMode::instantaneous: return run_instantaneous(cfg, frozen, opt);
        case FeedbackMode::delayed_sampled: return run_delayed_sampled(cfg, frozen, eps, opt);
        case FeedbackMode::delayed_conv: return run_delayed_conv(cfg, frozen, eps, opt);
    }
    return run_instantaneous(cfg, frozen, opt);
}

RunResult run_driven(const SimConfig& cfg, const FrozenNoise& frozen, const LossPath& ell, const RunOptions& opt) {
    return simulate(cfg, frozen, {Drive::driven, 0.0, &ell}, opt);
}

}  // namespace mvsim
