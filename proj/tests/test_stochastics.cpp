#include <algorithm>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "doctest.h"
#include "mvsim/random.hpp"
#include "mvsim/stochastics.hpp"

using namespace mvsim;

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

Moments moments(const std::vector<double>& xs) {
    Moments m;
    const auto n = static_cast<double>(xs.size());
    m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    for (double x : xs) m.var += (x - m.mean) * (x - m.mean);
    m.var /= n - 1.0;
    return m;
}

}  // namespace

TEST_CASE("streams replay and separate") {
    RngStream a(42, {3, StreamRole::increments});
    RngStream b(42, {3, StreamRole::increments});
    RngStream c(42, {4, StreamRole::increments});
    RngStream d(42, {3, StreamRole::initial});
    int same_c = 0;
    int same_d = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next_u64();
        REQUIRE(x == b.next_u64());
        same_c += x == c.next_u64();
        same_d += x == d.next_u64();
    }
    CHECK(same_c == 0);
    CHECK(same_d == 0);
    CHECK(a.position() == 1000);

    RngStream e(42, {3, StreamRole::increments});
    for (int i = 0; i < 17; ++i) e.next_u64();
    CHECK(counter_u64(e.key(), 17) == e.next_u64());
}

TEST_CASE("uniforms stay inside the open interval") {
    CHECK(bits_to_open_unit(0) > 0.0);
    CHECK(bits_to_open_unit(~0ull) < 1.0);
}

TEST_CASE("normal quantile against a reference") {
    const boost::math::normal_distribution<> nd;
    for (double p : {1e-12, 1e-6, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.97575, 0.999, 1 - 1e-9}) {
        const double ref = boost::math::quantile(nd, p);
        CHECK(std::abs(normal_quantile(p) - ref) <= 1.2e-9 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("initial laws") {
    RngStream rng(5, {0, StreamRole::initial});
    const auto dirac = sample_initial(InitialLaw::dirac(10.0), 3, rng);
    CHECK(dirac == std::vector<double>{10.0, 10.0, 10.0});

    const auto u = sample_initial(InitialLaw::uniform(0.25, 0.35), 1'000'000, rng);
    CHECK(*std::min_element(u.begin(), u.end()) >= 0.25);
    CHECK(*std::max_element(u.begin(), u.end()) <= 0.35);
    CHECK(std::abs(moments(u).mean - 0.30) <= 1e-4);

    CHECK_THROWS_AS(sample_initial(InitialLaw::uniform(0.0, 1.0), 3, rng), ConfigError);
    CHECK_THROWS_AS(sample_initial(InitialLaw::dirac(0.0), 3, rng), ConfigError);
    CHECK_THROWS_AS(sample_initial(InitialLaw::gamma(-1.0, 1.0), 3, rng), ConfigError);
}

TEST_CASE("gamma sampler moments") {
    RngStream rng(9, {0, StreamRole::initial});
    const int n = 1'000'000;
    for (auto [k, theta] : {std::pair{2.1, 0.5}, std::pair{1.2, 0.5}, std::pair{0.4, 2.0}}) {
        CAPTURE(k);
        std::vector<double> xs(n);
        for (auto& x : xs) x = sample_gamma(k, theta, rng);
        const auto m = moments(xs);
        const double mean = k * theta;
        const double var = k * theta * theta;
        CHECK(std::abs(m.mean - mean) <= 3.0 * std::sqrt(var / n));
        // var of the sample variance: (mu4 - var^2) / n, mu4 = 3 k (k + 2) theta^4 for the gamma law
        const double mu4 = 3.0 * k * (k + 2.0) * std::pow(theta, 4);
        CHECK(std::abs(m.var - var) <= 3.0 * std::sqrt((mu4 - var * var) / n));
        CHECK(*std::min_element(xs.begin(), xs.end()) > 0.0);
    }
}

TEST_CASE("gamma sampler matches the reference CDF") {
    RngStream rng(10, {0, StreamRole::initial});
    const boost::math::gamma_distribution<> gd(1.2, 0.5);
    std::vector<double> xs(100'000);
    for (auto& x : xs) x = sample_gamma(1.2, 0.5, rng);
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = boost::math::cdf(gd, xs[i]);
        d = std::max({d, (i + 1.0) / xs.size() - f, f - static_cast<double>(i) / xs.size()});
    }
    CHECK(d <= 0.01);
}

TEST_CASE("per-particle initial draws do not depend on n") {
    const auto a = sample_initial_per_particle(InitialLaw::gamma(1.2, 0.5), 50, 3);
    const auto b = sample_initial_per_particle(InitialLaw::gamma(1.2, 0.5), 80, 3);
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
}

TEST_CASE("brownian increments") {
    RngStream rng(1, {0, StreamRole::increments});
    const TimeGrid g(1.0, 1'000'000);
    const auto inc = brownian_increments(g, rng);
    CHECK(std::abs(moments(inc).var - 1.0) <= 0.005);

    RngStream r1(2, {0, StreamRole::common_noise});
    RngStream r2(2, {0, StreamRole::common_noise});
    const TimeGrid h(0.01, 100);
    const auto path = common_noise_path(NoiseSpec::random(), h, r1);
    const auto steps = brownian_increments(h, r2);
    CHECK(path.values[0] == 0.0);
    CHECK(path.values.back() == doctest::Approx(std::accumulate(steps.begin(), steps.end(), 0.0)).epsilon(1e-12));
}

TEST_CASE("bridge paths") {
    const TimeGrid g(0.01, 100);
    for (double z : {-1.0, 0.0, 1.0, 2.5}) {
        RngStream rng(3, {0, StreamRole::common_noise});
        const auto p = common_noise_path(NoiseSpec::bridge(z), g, rng);
        CHECK(p.values.front() == 0.0);
        CHECK(p.values.back() == z);
    }
    RngStream none_rng(3, {0, StreamRole::common_noise});
    const auto none = common_noise_path(NoiseSpec::none(), g, none_rng);
    CHECK(std::all_of(none.values.begin(), none.values.end(), [](double x) { return x == 0.0; }));
}

TEST_CASE("bridge variance t (1 - t / T)") {
    const TimeGrid g(0.01, 100);
    const int paths = 10'000;
    const std::size_t probes[] = {10, 25, 50, 80};
    std::vector<std::vector<double>> at(std::size(probes));
    for (int p = 0; p < paths; ++p) {
        RngStream rng(4, {static_cast<std::uint64_t>(p), StreamRole::common_noise});
        const auto path = common_noise_path(NoiseSpec::bridge(0.0), g, rng);
        for (std::size_t j = 0; j < std::size(probes); ++j) at[j].push_back(path.values[probes[j]]);
    }
    for (std::size_t j = 0; j < std::size(probes); ++j) {
        const double t = g.time(probes[j]);
        const double expected = t * (1.0 - t / g.t_max());
        CHECK(moments(at[j]).var == doctest::Approx(expected).epsilon(0.05));
    }
}

TEST_CASE("replayed common noise") {
    const TimeGrid g(0.5, 2);
    const auto dir = std::filesystem::temp_directory_path() / "mvsim_replay_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "ok.csv");
        out << "t,w0\n0,0\n0.5,0.25\n1,-0.5\n";
    }
    const auto w = load_replay_path(dir / "ok.csv", g);
    CHECK(w == std::vector<double>{0.0, 0.25, -0.5});
    RngStream rng(1, {0, StreamRole::common_noise});
    CHECK(common_noise_path(NoiseSpec::replay_values(w), g, rng).values == w);
    CHECK_THROWS_AS(common_noise_path(NoiseSpec::replay_values({0.0, 1.0}), g, rng), ConfigError);
    {
        std::ofstream out(dir / "short.csv");
        out << "0,0\n0.5,0.25\n";
    }
    CHECK_THROWS_AS(load_replay_path(dir / "short.csv", g), ConfigError);
    {
        std::ofstream out(dir / "times.csv");
        out << "0,0\n0.4,0.25\n1,0\n";
    }
    CHECK_THROWS_AS(load_replay_path(dir / "times.csv", g), ConfigError);
}
