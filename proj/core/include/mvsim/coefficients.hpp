#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mvsim {

/// Scalar function of time: a constant or a piecewise-linear table with flat extrapolation.
///
/// Text form: "0.5" or "table 0:0.5 0.05:0.7".
class TimeFunction {
  public:
    TimeFunction() = default;
    static TimeFunction constant(double value);
    static TimeFunction table(std::vector<std::pair<double, double>> knots);
    static TimeFunction parse(std::string_view text);

    double operator()(double t) const noexcept;
    bool is_constant() const noexcept { return knots_.size() == 1; }
    std::span<const std::pair<double, double>> knots() const noexcept { return knots_; }
    std::string describe() const;

    friend bool operator==(const TimeFunction&, const TimeFunction&) = default;

  private:
    std::vector<std::pair<double, double>> knots_{{0.0, 0.0}};
};

/// Drift b(t, x, m) where m is the first absolute moment of the alive particles.
///
/// Text form: "zero", "constant C", "linear C0 C1" (C0 + C1 x),
/// "mean_reverting K" (K (m - x)), "table t:v ..." (time only).
class Drift {
  public:
    enum class Kind { constant, linear, mean_reverting, time_table, custom };
    using Fn = std::function<double(double t, double x, double moment)>;

    Drift() = default;
    static Drift constant(double c);
    static Drift linear(double c0, double c1);
    static Drift mean_reverting(double kappa);
    static Drift time_table(TimeFunction f);
    static Drift custom(Fn fn, std::string label = "custom");
    static Drift parse(std::string_view text);

    double operator()(double t, double x, double moment) const;
    Kind kind() const noexcept { return kind_; }
    /// True when the value depends on the particle position.
    bool state_dependent() const noexcept;
    /// True when the value depends on the empirical moment.
    bool needs_moment() const noexcept;
    std::string describe() const;

  private:
    Kind kind_ = Kind::constant;
    double p0_ = 0.0;
    double p1_ = 0.0;
    TimeFunction time_;
    Fn fn_;
    std::string label_;
};

/// Volatility sigma(t, x). Text form: "1.0", "table t:v ...".
class Volatility {
  public:
    using Fn = std::function<double(double t, double x)>;

    Volatility() = default;
    static Volatility of_time(TimeFunction f);
    static Volatility custom(Fn fn, std::string label = "custom");
    static Volatility parse(std::string_view text);

    double operator()(double t, double x) const;
    bool state_dependent() const noexcept { return static_cast<bool>(fn_); }
    const TimeFunction& time_part() const noexcept { return time_; }
    std::string describe() const;

  private:
    TimeFunction time_ = TimeFunction::constant(1.0);
    Fn fn_;
    std::string label_;
};

/// Coefficients of the particle dynamics and the declared validation bounds.
struct CoefficientSet {
    Drift b;
    Volatility sigma;
    TimeFunction rho = TimeFunction::constant(0.0);
    TimeFunction alpha = TimeFunction::constant(0.0);
    double c_b = 100.0;
    double c_sigma = 100.0;
    double c_rho = 100.0;
};

}  // namespace mvsim
