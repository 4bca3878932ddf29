#include "mvsim/stochastics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mvsim/errors.hpp"

namespace mvsim {

namespace {

void require_valid(const InitialLaw& law) {
    switch (law.kind) {
        case InitialLaw::Kind::uniform:
            if (!(law.p1 > 0.0 && law.p2 > law.p1)) throw ConfigError("initial.uniform requires 0 < a < b");
            break;
        case InitialLaw::Kind::gamma:
            if (!(law.p1 > 0.0 && law.p2 > 0.0)) throw ConfigError("initial.gamma requires shape, scale > 0");
            break;
        case InitialLaw::Kind::dirac:
            if (!(law.p1 > 0.0)) throw ConfigError("initial.dirac requires c > 0");
            break;
    }
}

}  // namespace

std::vector<double> sample_initial(const InitialLaw& law, std::size_t n, RngStream& rng) {
    require_valid(law);
    if (n < 1) throw ConfigError("sample_initial requires n >= 1");
    std::vector<double> out(n);
    for (auto& x : out) x = sample_initial_one(law, rng);
    return out;
}

std::vector<double> sample_initial_per_particle(const InitialLaw& law, std::size_t n, std::uint64_t seed) {
    require_valid(law);
    if (n < 1) throw ConfigError("sample_initial requires n >= 1");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        RngStream rng(seed, {i, StreamRole::initial});
        out[i] = sample_initial_one(law, rng);
    }
    return out;
}

std::vector<double> brownian_increments(const TimeGrid& grid, RngStream& rng) {
    const double sd = std::sqrt(grid.dt());
    std::vector<double> out(grid.n_steps());
    for (auto& dw : out) dw = sd * rng.normal();
    return out;
}

CommonNoisePath common_noise_path(const NoiseSpec& spec, const TimeGrid& grid, RngStream& rng) {
    CommonNoisePath path{grid, std::vector<double>(grid.size(), 0.0)};
    switch (spec.kind) {
        case NoiseSpec::Kind::none: break;
        case NoiseSpec::Kind::random:
        case NoiseSpec::Kind::bridge: {
            const auto inc = brownian_increments(grid, rng);
            for (std::size_t k = 1; k < path.values.size(); ++k) path.values[k] = path.values[k - 1] + inc[k - 1];
            if (spec.kind == NoiseSpec::Kind::bridge) {
                if (!std::isfinite(spec.endpoint)) throw ConfigError("common_noise.endpoint finite");
                const double b_end = path.values.back();
                const auto n = static_cast<double>(grid.n_steps());
                for (std::size_t k = 1; k < path.values.size(); ++k) {
                    const double frac = static_cast<double>(k) / n;
                    path.values[k] = path.values[k] - frac * b_end + frac * spec.endpoint;
                }
                path.values.back() = spec.endpoint;
            }
            break;
        }
        case NoiseSpec::Kind::replay:
            if (spec.replay.size() != grid.size())
                throw ConfigError("common_noise replay length " + std::to_string(spec.replay.size()) +
                                  " does not match grid size " + std::to_string(grid.size()));
            path.values = spec.replay;
            break;
    }
    return path;
}

std::vector<double> load_replay_path(const std::filesystem::path& path, const TimeGrid& grid) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open replay path " + path.string());
    std::vector<double> w;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double t = 0.0;
        double v = 0.0;
        if (!(ls >> t >> v)) {
            if (lineno == 1) continue;
            throw IoError("replay path " + path.string() + ": bad line " + std::to_string(lineno));
        }
        const std::size_t k = w.size();
        if (k >= grid.size() || std::abs(t - grid.time(k)) > 1e-12 * std::max(grid.t_max(), 1.0))
            throw ConfigError("common_noise replay times must match the grid",
                              "row " + std::to_string(k));
        w.push_back(v);
    }
    if (w.size() != grid.size()) throw ConfigError("common_noise replay length matches grid");
    return w;
}

}  // namespace mvsim
