#include "mvsim/coefficients.hpp"

#include <algorithm>
#include <cmath>

#include "mvsim/errors.hpp"
#include "mvsim/text.hpp"

namespace mvsim {

namespace {

std::vector<std::pair<double, double>> parse_knots(std::string_view body, std::string_view what) {
    std::vector<std::pair<double, double>> knots;
    for (auto tok : text::split(body, " \t,;")) {
        const auto colon = tok.find(':');
        if (colon == std::string_view::npos)
            throw ConfigError(std::string(what) + ": table entries must be t:value");
        knots.emplace_back(text::parse_double(tok.substr(0, colon), what),
                           text::parse_double(tok.substr(colon + 1), what));
    }
    return knots;
}

std::pair<std::string_view, std::string_view> head_tail(std::string_view text) {
    text = text::trim(text);
    const auto sp = text.find_first_of(" \t");
    if (sp == std::string_view::npos) return {text, {}};
    return {text.substr(0, sp), text::trim(text.substr(sp + 1))};
}

}  // namespace

TimeFunction TimeFunction::constant(double value) {
    TimeFunction f;
    f.knots_ = {{0.0, value}};
    return f;
}

TimeFunction TimeFunction::table(std::vector<std::pair<double, double>> knots) {
    if (knots.empty()) throw ConfigError("time table must have at least one knot");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i].first > knots[i - 1].first))
            throw ConfigError("time table knots must have strictly increasing times");
    TimeFunction f;
    f.knots_ = std::move(knots);
    return f;
}

TimeFunction TimeFunction::parse(std::string_view text) {
    auto [head, tail] = head_tail(text);
    if (head == "table") return table(parse_knots(tail, "time table"));
    if (head == "constant") return constant(text::parse_double(tail, "constant"));
    return constant(text::parse_double(text, "scalar"));
}

double TimeFunction::operator()(double t) const noexcept {
    if (knots_.size() == 1 || t <= knots_.front().first) return knots_.front().second;
    if (t >= knots_.back().first) return knots_.back().second;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                               [](double v, const auto& kn) { return v < kn.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (t - lo.first) / (hi.first - lo.first);
    return (1.0 - w) * lo.second + w * hi.second;
}

std::string TimeFunction::describe() const {
    if (is_constant()) return text::format_double(knots_.front().second);
    std::string s = "table";
    for (const auto& [t, v] : knots_) s += " " + text::format_double(t) + ":" + text::format_double(v);
    return s;
}

Drift Drift::constant(double c) {
    Drift d;
    d.kind_ = Kind::constant;
    d.p0_ = c;
    return d;
}

Drift Drift::linear(double c0, double c1) {
    Drift d;
    d.kind_ = Kind::linear;
    d.p0_ = c0;
    d.p1_ = c1;
    return d;
}

Drift Drift::mean_reverting(double kappa) {
    Drift d;
    d.kind_ = Kind::mean_reverting;
    d.p0_ = kappa;
    return d;
}

Drift Drift::time_table(TimeFunction f) {
    Drift d;
    d.kind_ = Kind::time_table;
    d.time_ = std::move(f);
    return d;
}

Drift Drift::custom(Fn fn, std::string label) {
    Drift d;
    d.kind_ = Kind::custom;
    d.fn_ = std::move(fn);
    d.label_ = std::move(label);
    return d;
}

Drift Drift::parse(std::string_view text) {
    auto [head, tail] = head_tail(text);
    if (head == "zero") return constant(0.0);
    if (head == "constant") return constant(text::parse_double(tail, "b constant"));
    if (head == "linear") {
        auto parts = text::split(tail, " \t,");
        if (parts.size() != 2) throw ConfigError("b linear takes two numbers");
        return linear(text::parse_double(parts[0], "b linear"), text::parse_double(parts[1], "b linear"));
    }
    if (head == "mean_reverting") return mean_reverting(text::parse_double(tail, "b mean_reverting"));
    if (head == "table") return time_table(TimeFunction::table(parse_knots(tail, "b table")));
    throw ConfigError("unknown drift '" + std::string(text) + "'");
}

double Drift::operator()(double t, double x, double moment) const {
    switch (kind_) {
        case Kind::constant: return p0_;
        case Kind::linear: return p0_ + p1_ * x;
        case Kind::mean_reverting: return p0_ * (moment - x);
        case Kind::time_table: return time_(t);
        case Kind::custom: return fn_(t, x, moment);
    }
    return 0.0;
}

bool Drift::state_dependent() const noexcept {
    return kind_ == Kind::mean_reverting || kind_ == Kind::custom || (kind_ == Kind::linear && p1_ != 0.0);
}

bool Drift::needs_moment() const noexcept {
    return kind_ == Kind::mean_reverting || kind_ == Kind::custom;
}

std::string Drift::describe() const {
    switch (kind_) {
        case Kind::constant: return p0_ == 0.0 ? "zero" : "constant " + text::format_double(p0_);
        case Kind::linear: return "linear " + text::format_double(p0_) + " " + text::format_double(p1_);
        case Kind::mean_reverting: return "mean_reverting " + text::format_double(p0_);
        case Kind::time_table:
            return time_.is_constant() ? "constant " + text::format_double(time_(0.0)) : time_.describe();
        case Kind::custom: return label_;
    }
    return "unknown";
}

Volatility Volatility::of_time(TimeFunction f) {
    Volatility v;
    v.time_ = std::move(f);
    return v;
}

Volatility Volatility::custom(Fn fn, std::string label) {
    Volatility v;
    v.fn_ = std::move(fn);
    v.label_ = std::move(label);
    return v;
}

Volatility Volatility::parse(std::string_view text) { return of_time(TimeFunction::parse(text)); }

double Volatility::operator()(double t, double x) const { return fn_ ? fn_(t, x) : time_(t); }

std::string Volatility::describe() const { return fn_ ? label_ : time_.describe(); }

}  // namespace mvsim
