#include "mvsim/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "mvsim/errors.hpp"
#include "mvsim/text.hpp"

namespace mvsim {

double sup_error(const LossPath& l1, const LossPath& l2, double t0) {
    require_same_grid(l1.grid(), l2.grid(), "sup_error");
    const auto& grid = l1.grid();
    if (t0 > grid.t_max() * (1.0 + 1e-12)) throw DomainError("sup_error: t0 beyond t_max");
    const std::size_t kmax = t0 >= grid.t_max() ? grid.n_steps() : grid.index_at_or_before(t0);
    double e = 0.0;
    for (std::size_t k = 0; k <= kmax; ++k) e = std::max(e, std::abs(l1[k] - l2[k]));
    return e;
}

namespace {

// inf{e : f(t+e) + e >= g(t) for all t, and g(t) >= f(t-e) - e for all t}.
double shift_violation(std::span<const double> f, std::span<const double> g, std::size_t j) {
    const std::size_t n = f.size() - 1;
    double v = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        v = std::max(v, g[k] - f[std::min(k + j, n)]);
        v = std::max(v, f[k >= j ? k - j : 0] - g[k]);
    }
    return v;
}

// The violation is nonincreasing in the shift, so the optimum sits where it
// crosses the shift itself.
double levy_one_sided(std::span<const double> f, std::span<const double> g, double dt) {
    const std::size_t n = f.size() - 1;
    const double edge = std::max(g[0] - f[0], f[n] - g[n]);
    std::size_t lo = 0;
    std::size_t hi = n + 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (shift_violation(f, g, mid) <= static_cast<double>(mid) * dt)
            hi = mid;
        else
            lo = mid + 1;
    }
    double best = 1.0;
    if (lo <= n) best = std::min(best, static_cast<double>(lo) * dt);
    if (lo > 0) best = std::min(best, std::max(shift_violation(f, g, lo - 1), static_cast<double>(lo - 1) * dt));
    return std::max(best, std::min(edge, 1.0));
}

}  // namespace

double levy_metric(const LossPath& l1, const LossPath& l2) {
    require_same_grid(l1.grid(), l2.grid(), "levy_metric");
    const double dt = l1.grid().dt();
    return std::max(levy_one_sided(l1.values(), l2.values(), dt), levy_one_sided(l2.values(), l1.values(), dt));
}

LinearFit fit_rate(std::span<const double> eps, std::span<const double> errors) {
    if (eps.size() != errors.size() || eps.size() < 2) throw DomainError("fit_rate: need >= 2 paired points");
    const auto n = static_cast<double>(eps.size());
    std::vector<double> x(eps.size());
    std::vector<double> y(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0) || !(errors[i] > 0.0)) throw DomainError("fit_rate: eps and errors must be positive");
        x[i] = std::log(eps[i]);
        y[i] = std::log(errors[i]);
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DegenerateFit("fit_rate: all eps are equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

std::vector<double> pairwise_rates(std::span<const double> eps, std::span<const double> errors) {
    if (eps.size() != errors.size() || eps.size() < 2) throw DomainError("pairwise_rates: need >= 2 paired points");
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < eps.size(); ++i) {
        if (!(errors[i] > 0.0) || !(errors[i + 1] > 0.0)) throw DomainError("pairwise_rates: zero error entry");
        const double dx = std::log(eps[i + 1]) - std::log(eps[i]);
        if (dx == 0.0) throw DegenerateFit("pairwise_rates: repeated eps");
        out.push_back((std::log(errors[i + 1]) - std::log(errors[i])) / dx);
    }
    return out;
}

double log_gamma(double x) {
    static constexpr std::array<double, 9> c = {
        0.99999999999980993,  676.5203681218851,   -1259.1392167224028,
        771.32342877765313,   -176.61502916214059, 12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
    if (x < 0.5) return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
    const double z = x - 1.0;
    double a = c[0];
    const double t = z + 7.5;
    for (std::size_t i = 1; i < c.size(); ++i) a += c[i] / (z + static_cast<double>(i));
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

double log_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta_function: arguments must be positive");
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double beta_function(double a, double b) { return std::exp(log_beta(a, b)); }

void validate_gronwall(const GronwallParams& p) {
    if (!(p.a >= 0.0) || !(p.g >= 0.0) || !(p.t >= 0.0)) throw DomainError("gronwall: a, g, t must be nonnegative");
    if (!(p.alpha_t > 0.0)) throw DomainError("gronwall: alpha_t must be positive");
    if (!(p.beta_t > 0.0 && p.beta_t < 1.0)) throw DomainError("gronwall: beta_t must lie in (0, 1)");
    if (!(p.alpha_t + p.beta_t - 1.0 > 0.0)) throw DomainError("gronwall: alpha_t + beta_t must exceed 1");
    if (!(p.tol > 0.0)) throw DomainError("gronwall: tol must be positive");
}

namespace {

// log C_{n+1} - log C_n; the n = 0 step gives log C_1 = log B(at, bt).
double log_coefficient_step(double at, double bt, std::size_t n) {
    const auto nn = static_cast<double>(n);
    return log_beta((nn + 1.0) * at + nn * bt - nn, bt);
}

}  // namespace

std::vector<double> gronwall_coefficients(double alpha_t, double beta_t, std::size_t count) {
    std::vector<double> out;
    double c = 1.0;
    for (std::size_t n = 0; n < count; ++n) {
        c *= std::exp(log_coefficient_step(alpha_t, beta_t, n));
        out.push_back(c);
    }
    return out;
}

GronwallResult gronwall_bound(const GronwallParams& p, std::size_t max_terms) {
    validate_gronwall(p);
    if (p.g == 0.0 || p.t == 0.0 || p.a == 0.0) return {p.a, 0};
    const double power = p.alpha_t + p.beta_t - 1.0;
    const double log_x = std::log(p.g) + power * std::log(p.t);
    double sum = 1.0;
    double log_c = 0.0;
    for (std::size_t n = 1; n <= max_terms; ++n) {
        log_c += log_coefficient_step(p.alpha_t, p.beta_t, n - 1);
        const double term = std::exp(static_cast<double>(n) * log_x + log_c);
        sum += term;
        if (!std::isfinite(sum)) break;
        if (term <= p.tol * sum) return {p.a * sum, n};
    }
    throw NonConvergence("gronwall_bound: series not converged within " + std::to_string(max_terms) + " terms",
                         max_terms);
}

RatePrediction theoretical_rate(const InitialLaw& law) {
    switch (law.kind) {
        case InitialLaw::Kind::uniform:
            if (law.p1 > 0.0) return {true, 0.5, "density vanishes near 0 (smooth-loss regime)"};
            return {false, 0.0, "uniform law with mass at 0"};
        case InitialLaw::Kind::gamma:
            if (auto beta = law.boundary_exponent())
                return {true, *beta / 2.0, "boundary density ~ x^" + text::format_short(*beta)};
            return {false, 0.0, "gamma shape k outside 1 < k < 2 (boundary exponent k - 1 not in (0, 1))"};
        case InitialLaw::Kind::dirac: return {false, 0.0, "dirac law has no bounded density"};
    }
    return {false, 0.0, "unknown law"};
}

void analyze_errors(RateReport& r) {
    r.fitted = false;
    r.slope = r.intercept = r.r2 = 0.0;
    r.beta_n.clear();
    if (r.eps.size() != r.errors.size()) throw DomainError("analyze_errors: eps and errors differ in length");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i + 1 < r.eps.size(); ++i) {
        if (r.errors[i] > 0.0 && r.errors[i + 1] > 0.0) {
            const double e[2] = {r.eps[i], r.eps[i + 1]};
            const double v[2] = {r.errors[i], r.errors[i + 1]};
            r.beta_n.push_back(pairwise_rates(e, v)[0]);
        } else {
            r.beta_n.push_back(nan);
        }
    }
    std::vector<double> fe;
    std::vector<double> fv;
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < r.eps.size(); ++i) {
        if (r.errors[i] > 0.0) {
            fe.push_back(r.eps[i]);
            fv.push_back(r.errors[i]);
        } else {
            ++dropped;
        }
    }
    if (dropped > 0) r.notes.push_back(std::to_string(dropped) + " zero error(s) dropped from the fit");
    if (fe.size() < 2) {
        r.notes.push_back("fit skipped: fewer than two positive errors");
        return;
    }
    const auto fit = fit_rate(fe, fv);
    r.slope = fit.slope;
    r.intercept = fit.intercept;
    r.r2 = fit.r2;
    r.fitted = true;
}

}  // namespace mvsim
