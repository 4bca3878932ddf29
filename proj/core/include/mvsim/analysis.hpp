#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mvsim/config.hpp"
#include "mvsim/grid.hpp"

namespace mvsim {

/// max over grid points t_k <= t0 of |l1[k] - l2[k]|.
double sup_error(const LossPath& l1, const LossPath& l2, double t0);

/// Levy distance between two grid step paths (right-continuous, constant outside the grid).
/// Exact for such paths; symmetric by construction.
double levy_metric(const LossPath& l1, const LossPath& l2);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// OLS of log(errors) on log(eps). Throws DegenerateFit when all eps coincide.
LinearFit fit_rate(std::span<const double> eps, std::span<const double> errors);

/// beta_n = (log Err_{n+1} - log Err_n) / (log eps_{n+1} - log eps_n).
std::vector<double> pairwise_rates(std::span<const double> eps, std::span<const double> errors);

/// log Gamma(x) for x > 0 (Lanczos, g = 7, 9 terms; relative error about 1e-15).
double log_gamma(double x);
double log_beta(double a, double b);
double beta_function(double a, double b);

struct GronwallParams {
    double a = 0.0;
    double g = 0.0;
    double alpha_t = 1.0;
    double beta_t = 0.5;
    double t = 0.0;
    double tol = 1e-12;
};

/// Throws DomainError unless a, g, t >= 0, alpha_t > 0, 0 < beta_t < 1, alpha_t + beta_t > 1, tol > 0.
void validate_gronwall(const GronwallParams& p);

/// C_1 .. C_count of the series: C_1 = B(at, bt), C_{n+1} = B((n+1)at + n bt - n, bt) C_n.
std::vector<double> gronwall_coefficients(double alpha_t, double beta_t, std::size_t count);

struct GronwallResult {
    double bound = 0.0;
    std::size_t terms = 0;
};

/// a [1 + sum_n g^n C_n t^{n(at + bt - 1)}], summed until a term is <= tol times the running sum.
/// Throws NonConvergence when max_terms is reached first.
GronwallResult gronwall_bound(const GronwallParams& p, std::size_t max_terms);

/// Predicted exponent of sup|L - L^eps| in eps, or the hypothesis that fails.
struct RatePrediction {
    bool covered = false;
    double exponent = 0.0;
    std::string reason;
};

RatePrediction theoretical_rate(const InitialLaw& law);

/// Result of a rate experiment (or of a synthetic error ladder).
struct RateReport {
    std::vector<double> eps;
    std::vector<double> errors;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    bool fitted = false;
    std::vector<double> beta_n;  // NaN where a pair contains a zero error
    std::uint64_t seed = 0;
    std::string config_digest;
    std::string mode;
    std::string status = "ok";
    std::vector<std::string> notes;
    std::vector<double> runtimes_s;
};

/// Fills fit and pairwise gradients from report.eps / report.errors; zero errors are dropped from the fit with a note.
void analyze_errors(RateReport& report);

}  // namespace mvsim
