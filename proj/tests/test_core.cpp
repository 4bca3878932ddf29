#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "mvsim/coefficients.hpp"
#include "mvsim/config.hpp"
#include "mvsim/grid.hpp"
#include "mvsim/text.hpp"

using namespace mvsim;

namespace {

bool has_constraint(const ConfigError& e, std::string_view needle) {
    return std::any_of(e.violations().begin(), e.violations().end(),
                       [&](const ConfigViolation& v) { return v.constraint.find(needle) != std::string::npos; });
}

SimConfig small_config() {
    SimConfig c;
    c.n_particles = 100;
    c.grid = TimeGrid(1e-3, 100);
    c.coefficients.alpha = TimeFunction::constant(0.5);
    c.eps_ladder = {0.01, 0.02};
    return c;
}

}  // namespace

TEST_CASE("time grid geometry") {
    const TimeGrid g(0.25, 4);
    CHECK(g.size() == 5);
    CHECK(g.t_max() == 1.0);
    CHECK(g.time(3) == 0.75);
    CHECK(g.index_at_or_before(0.74) == 2);
    CHECK(g.index_at_or_before(0.75) == 3);
    CHECK(g.index_at_or_before(-1.0) == 0);
    CHECK(g.index_at_or_before(9.0) == 4);

    const auto h = TimeGrid::from_horizon(1e-5, 0.05);
    CHECK(h.n_steps() == 5000);
    CHECK_THROWS_AS(TimeGrid::from_horizon(0.3, 1.0), ConfigError);
    CHECK_THROWS_AS(TimeGrid(0.0, 10), ConfigError);
    CHECK_THROWS_AS(TimeGrid(1.0, 0), ConfigError);
}

TEST_CASE("loss path construction rejects rather than clamps") {
    const TimeGrid g(1.0, 2);
    CHECK_NOTHROW(make_loss_path(g, {0, 0, 0}));
    CHECK_NOTHROW(make_loss_path(g, {0, 0.5, 1.0}));
    try {
        make_loss_path(g, {0, 0.5, 0.4});
        FAIL("expected MonotonicityError");
    } catch (const MonotonicityError& e) {
        CHECK(e.index() == 2);
    }
    try {
        make_loss_path(g, {0, 1.5, 1.5});
        FAIL("expected RangeError");
    } catch (const RangeError& e) {
        CHECK(e.index() == 1);
    }
    CHECK_THROWS_AS(make_loss_path(g, {-0.1, 0, 0}), RangeError);
    CHECK_THROWS_AS(make_loss_path(g, {0, 0}), GridMismatch);
    CHECK_THROWS_AS(make_loss_path(g, {0, std::nan(""), 1}), RangeError);
}

TEST_CASE("accepted loss paths satisfy the path invariants") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const TimeGrid g(0.1, 30);
    int accepted = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> v(g.size());
        for (auto& x : v) x = u(gen) * 1.2 - 0.1;
        if (trial % 2 == 0) std::sort(v.begin(), v.end());
        try {
            const auto p = make_loss_path(g, v);
            ++accepted;
            for (std::size_t k = 0; k < p.size(); ++k) {
                REQUIRE(p[k] >= 0.0);
                REQUIRE(p[k] <= 1.0);
                if (k > 0) REQUIRE(p[k - 1] <= p[k]);
            }
        } catch (const MonotonicityError&) {
        } catch (const RangeError&) {
        }
    }
    CHECK(accepted > 0);
}

TEST_CASE("pointwise order and grid checks") {
    const TimeGrid g(1.0, 2);
    const auto a = make_loss_path(g, {0, 0.2, 0.3});
    const auto b = make_loss_path(g, {0, 0.2, 0.4});
    CHECK(pointwise_leq(a, b));
    CHECK_FALSE(pointwise_leq(b, a));
    CHECK_THROWS_AS(require_same_grid(g, TimeGrid(0.5, 4), "test"), GridMismatch);
}

TEST_CASE("validation follows the stated bounds") {
    SUBCASE("rho at the boundary 1 - 1/C_rho is accepted") {
        auto c = small_config();
        c.noise = NoiseSpec::random();
        c.coefficients.rho = TimeFunction::constant(0.5);
        c.coefficients.c_rho = 2.0;
        CHECK(check_config(c).empty());
    }
    SUBCASE("rho above the boundary is rejected") {
        auto c = small_config();
        c.noise = NoiseSpec::random();
        c.coefficients.rho = TimeFunction::constant(0.6);
        c.coefficients.c_rho = 2.0;
        CHECK_THROWS_AS(validate_config(c), ConfigError);
    }
    SUBCASE("zero volatility violates non-degeneracy") {
        auto c = small_config();
        c.coefficients.sigma = Volatility::of_time(TimeFunction::constant(0.0));
        try {
            validate_config(c);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(has_constraint(e, "non-degeneracy"));
            CHECK_FALSE(e.violations().front().probe.empty());
        }
    }
    SUBCASE("dt coarser than min eps / 10 is rejected in delayed mode") {
        auto c = small_config();
        c.grid = TimeGrid(0.002, 50);
        c.eps_ladder = {0.01};
        try {
            validate_config(c);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(has_constraint(e, "discretisation"));
        }
        c.feedback_mode = FeedbackMode::instantaneous;
        c.eps_ladder.clear();
        CHECK_NOTHROW(validate_config(c));
    }
    SUBCASE("dt exactly min eps / 10 passes") {
        auto c = small_config();
        c.eps_ladder = {0.01};
        CHECK(check_config(c).empty());
    }
    SUBCASE("nonpositive eps") {
        auto c = small_config();
        c.eps_ladder = {0.01, 0.0};
        CHECK_THROWS_AS(validate_config(c), ConfigError);
    }
    SUBCASE("initial law must put all mass on (0, inf)") {
        auto c = small_config();
        c.initial = InitialLaw::uniform(0.0, 0.3);
        CHECK_FALSE(check_config(c).empty());
        c.initial = InitialLaw::dirac(-1.0);
        CHECK_FALSE(check_config(c).empty());
        c.initial = InitialLaw::gamma(1.2, 0.0);
        CHECK_FALSE(check_config(c).empty());
    }
    SUBCASE("alpha must be nonnegative and nondecreasing") {
        auto c = small_config();
        c.coefficients.alpha = TimeFunction::table({{0.0, 0.5}, {0.05, 0.3}});
        CHECK_FALSE(check_config(c).empty());
        c.coefficients.alpha = TimeFunction::constant(-0.1);
        CHECK_FALSE(check_config(c).empty());
    }
    SUBCASE("every failing constraint is reported") {
        auto c = small_config();
        c.coefficients.sigma = Volatility::of_time(TimeFunction::constant(0.0));
        c.eps_ladder = {-1.0};
        c.initial = InitialLaw::dirac(0.0);
        CHECK(check_config(c).size() >= 3);
    }
}

TEST_CASE("validation is idempotent") {
    const auto c = small_config();
    const SimConfig& once = validate_config(c);
    const SimConfig& twice = validate_config(once);
    CHECK(&once == &c);
    CHECK(&twice == &c);
}

TEST_CASE("time functions and coefficient grammar") {
    const auto f = TimeFunction::parse("table 0:0.5 0.1:0.7");
    CHECK(f(0.0) == doctest::Approx(0.5));
    CHECK(f(0.05) == doctest::Approx(0.6));
    CHECK(f(1.0) == doctest::Approx(0.7));
    CHECK(f(-1.0) == doctest::Approx(0.5));
    CHECK(TimeFunction::parse(f.describe()) == f);
    CHECK(TimeFunction::parse("0.25").is_constant());

    const auto b = Drift::parse("linear 1 -2");
    CHECK(b(0.0, 0.5, 0.0) == doctest::Approx(0.0));
    CHECK(b.state_dependent());
    const auto mr = Drift::parse("mean_reverting 3");
    CHECK(mr(0.0, 1.0, 2.0) == doctest::Approx(3.0));
    CHECK(mr.needs_moment());
    CHECK_FALSE(Drift::parse("zero").state_dependent());
    CHECK(Drift::parse(mr.describe()).describe() == mr.describe());
    CHECK_THROWS_AS(Drift::parse("cubic 1"), ConfigError);

    const auto s = Volatility::parse("1.5");
    CHECK(s(0.3, 7.0) == 1.5);
    CHECK_FALSE(s.state_dependent());
}

TEST_CASE("log spaced ladders") {
    const auto xs = log_spaced(1e-4, 1e-3, 5);
    REQUIRE(xs.size() == 5);
    CHECK(xs.front() == doctest::Approx(1e-4).epsilon(1e-14));
    CHECK(xs.back() == doctest::Approx(1e-3).epsilon(1e-14));
    for (std::size_t i = 1; i < xs.size(); ++i)
        CHECK(std::log(xs[i] / xs[i - 1]) == doctest::Approx(std::log(10.0) / 4.0).epsilon(1e-12));
}

TEST_CASE("boundary exponent of the initial law") {
    CHECK(InitialLaw::gamma(1.2, 0.5).boundary_exponent().value() == doctest::Approx(0.2));
    CHECK_FALSE(InitialLaw::gamma(2.1, 0.5).boundary_exponent());
    CHECK_FALSE(InitialLaw::uniform(0.25, 0.35).boundary_exponent());
    CHECK_FALSE(InitialLaw::dirac(1.0).boundary_exponent());
}

TEST_CASE("text helpers round-trip doubles") {
    for (double x : {0.1, 1.0 / 3.0, 1e-9, 3162278.0, -2.5e-300}) CHECK(text::parse_double(text::format_double(x), "x") == x);
    CHECK_THROWS_AS(text::parse_double("1.0abc", "x"), ConfigError);
    CHECK(text::parse_uint("42", "n") == 42u);
    CHECK_THROWS_AS(text::parse_uint("-3", "n"), ConfigError);
    CHECK(text::trim("  a b \t") == "a b");
}
