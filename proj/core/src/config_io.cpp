#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mvsim/harness.hpp"
#include "mvsim/stochastics.hpp"
#include "mvsim/text.hpp"

namespace mvsim {

namespace {

using Fields = std::vector<std::pair<std::string, std::string>>;

std::string join_numbers(const std::vector<double>& xs, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) s += sep;
        s += text::format_double(xs[i]);
    }
    return s;
}

std::vector<double> parse_numbers(std::string_view v, std::string_view what) {
    std::vector<double> out;
    for (auto tok : text::split(v, " \t,;")) out.push_back(text::parse_double(tok, what));
    return out;
}

Fields canonical_fields(const SimConfig& c) {
    const auto& co = c.coefficients;
    Fields f;
    f.emplace_back("n_particles", std::to_string(c.n_particles));
    f.emplace_back("dt", text::format_double(c.grid.dt()));
    f.emplace_back("t_max", text::format_double(c.grid.t_max()));
    f.emplace_back("alpha", co.alpha.describe());
    f.emplace_back("rho", co.rho.describe());
    f.emplace_back("b", co.b.describe());
    f.emplace_back("sigma", co.sigma.describe());
    switch (c.initial.kind) {
        case InitialLaw::Kind::uniform:
            f.emplace_back("initial.kind", "uniform");
            f.emplace_back("initial.params", join_numbers({c.initial.p1, c.initial.p2}, ","));
            break;
        case InitialLaw::Kind::gamma:
            f.emplace_back("initial.kind", "gamma");
            f.emplace_back("initial.params", join_numbers({c.initial.p1, c.initial.p2}, ","));
            break;
        case InitialLaw::Kind::dirac:
            f.emplace_back("initial.kind", "dirac");
            f.emplace_back("initial.params", join_numbers({c.initial.p1}, ","));
            break;
    }
    f.emplace_back("kernel.kind", c.kernel.name());
    if (c.kernel.kind() == Kernel::Kind::table) {
        std::string t;
        const auto br = c.kernel.breakpoints();
        const auto de = c.kernel.densities();
        for (std::size_t i = 0; i < br.size(); ++i) {
            if (i > 0) t += " ";
            t += text::format_double(br[i]) + ":" + text::format_double(de[i]);
        }
        f.emplace_back("kernel.table", t);
    }
    f.emplace_back("feedback_mode", to_string(c.feedback_mode));
    f.emplace_back("eps.list", join_numbers(c.eps_ladder, " "));
    switch (c.noise.kind) {
        case NoiseSpec::Kind::none: f.emplace_back("common_noise.kind", "none"); break;
        case NoiseSpec::Kind::random: f.emplace_back("common_noise.kind", "random"); break;
        case NoiseSpec::Kind::bridge:
            f.emplace_back("common_noise.kind", "bridge");
            f.emplace_back("common_noise.endpoint", text::format_double(c.noise.endpoint));
            break;
        case NoiseSpec::Kind::replay:
            f.emplace_back("common_noise.kind", "replay");
            f.emplace_back("common_noise.path", c.noise.path);
            break;
    }
    f.emplace_back("coupling", to_string(c.coupling));
    f.emplace_back("seed", std::to_string(c.seed));
    f.emplace_back("bounds.c_b", text::format_double(co.c_b));
    f.emplace_back("bounds.c_sigma", text::format_double(co.c_sigma));
    f.emplace_back("bounds.c_rho", text::format_double(co.c_rho));
    return f;
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "n_particles", "dt",          "t_max",         "alpha",         "rho",
        "b",           "sigma",       "initial.kind",  "initial.params", "kernel.kind",
        "kernel.path", "kernel.table", "feedback_mode", "eps.start",     "eps.ratio",
        "eps.count",   "eps.list",    "common_noise.kind", "common_noise.endpoint", "common_noise.path",
        "coupling",    "seed",        "bounds.c_b",    "bounds.c_sigma", "bounds.c_rho"};
    return keys;
}

template <class F>
auto wrap_domain(F&& f) {
    try {
        return f();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

SimConfig parse_config(std::string_view body, const std::filesystem::path& base_dir,
                       std::vector<std::string>* warnings) {
    std::map<std::string, std::string> kv;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        const auto nl = body.find('\n', pos);
        std::string_view line = body.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? body.size() + 1 : nl + 1;
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key(text::trim(line.substr(0, eq)));
        std::string value(text::trim(line.substr(eq + 1)));
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
            throw ConfigError("unknown config key '" + key + "'", "line " + std::to_string(lineno));
        if (!kv.emplace(key, value).second) throw ConfigError("duplicate config key '" + key + "'");
    }
    auto get = [&](const std::string& k) -> const std::string* {
        auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };

    SimConfig c;
    if (auto v = get("n_particles")) c.n_particles = text::parse_uint(*v, "n_particles");
    {
        const double dt = get("dt") ? text::parse_double(*get("dt"), "dt") : c.grid.dt();
        const double t_max = get("t_max") ? text::parse_double(*get("t_max"), "t_max") : c.grid.t_max();
        c.grid = wrap_domain([&] { return TimeGrid::from_horizon(dt, t_max); });
    }
    auto& co = c.coefficients;
    if (auto v = get("alpha")) co.alpha = TimeFunction::parse(*v);
    if (auto v = get("rho")) co.rho = TimeFunction::parse(*v);
    if (auto v = get("b")) co.b = Drift::parse(*v);
    if (auto v = get("sigma")) co.sigma = Volatility::parse(*v);
    if (auto v = get("bounds.c_b")) co.c_b = text::parse_double(*v, "bounds.c_b");
    if (auto v = get("bounds.c_sigma")) co.c_sigma = text::parse_double(*v, "bounds.c_sigma");
    if (auto v = get("bounds.c_rho")) co.c_rho = text::parse_double(*v, "bounds.c_rho");

    if (auto v = get("initial.kind")) {
        const auto params = get("initial.params") ? parse_numbers(*get("initial.params"), "initial.params")
                                                  : std::vector<double>{};
        auto need = [&](std::size_t n) {
            if (params.size() != n)
                throw ConfigError("initial.params for " + *v + " takes " + std::to_string(n) + " values");
        };
        if (*v == "uniform") {
            need(2);
            c.initial = InitialLaw::uniform(params[0], params[1]);
        } else if (*v == "gamma") {
            need(2);
            c.initial = InitialLaw::gamma(params[0], params[1]);
        } else if (*v == "dirac") {
            need(1);
            c.initial = InitialLaw::dirac(params[0]);
        } else {
            throw ConfigError("unknown initial.kind '" + *v + "'");
        }
    } else if (get("initial.params")) {
        throw ConfigError("initial.params given without initial.kind");
    }

    if (auto v = get("kernel.kind")) {
        if (*v == "beta22") {
            c.kernel = Kernel::beta22();
        } else if (*v == "triangular") {
            c.kernel = Kernel::triangular();
        } else if (*v == "table") {
            if (auto p = get("kernel.path")) {
                std::filesystem::path path(*p);
                if (path.is_relative()) path = base_dir / path;
                c.kernel = wrap_domain([&] { return load_table_kernel(path, warnings); });
            } else if (auto t = get("kernel.table")) {
                std::vector<double> br;
                std::vector<double> de;
                for (auto tok : text::split(*t, " \t,;")) {
                    const auto colon = tok.find(':');
                    if (colon == std::string_view::npos) throw ConfigError("kernel.table entries must be x:density");
                    br.push_back(text::parse_double(tok.substr(0, colon), "kernel.table"));
                    de.push_back(text::parse_double(tok.substr(colon + 1), "kernel.table"));
                }
                c.kernel = wrap_domain([&] { return Kernel::table(br, de, warnings); });
            } else {
                throw ConfigError("kernel.kind = table requires kernel.path or kernel.table");
            }
        } else {
            throw ConfigError("unknown kernel.kind '" + *v + "'");
        }
    }

    if (auto v = get("feedback_mode")) c.feedback_mode = parse_feedback_mode(*v);

    if (auto v = get("eps.list")) {
        if (get("eps.start")) throw ConfigError("give either eps.list or eps.start/.ratio/.count");
        c.eps_ladder = parse_numbers(*v, "eps.list");
    } else if (auto s = get("eps.start")) {
        const double start = text::parse_double(*s, "eps.start");
        const double ratio = get("eps.ratio") ? text::parse_double(*get("eps.ratio"), "eps.ratio") : 1.0;
        const auto count = get("eps.count") ? text::parse_uint(*get("eps.count"), "eps.count") : 1;
        double e = start;
        for (unsigned long long i = 0; i < count; ++i, e *= ratio) c.eps_ladder.push_back(e);
    }

    if (auto v = get("common_noise.kind")) {
        if (*v == "none") {
            c.noise = NoiseSpec::none();
        } else if (*v == "random") {
            c.noise = NoiseSpec::random();
        } else if (*v == "bridge") {
            const auto e = get("common_noise.endpoint");
            if (!e) throw ConfigError("common_noise.kind = bridge requires common_noise.endpoint");
            c.noise = NoiseSpec::bridge(text::parse_double(*e, "common_noise.endpoint"));
        } else if (*v == "replay") {
            const auto p = get("common_noise.path");
            if (!p) throw ConfigError("common_noise.kind = replay requires common_noise.path");
            std::filesystem::path path(*p);
            if (path.is_relative()) path = base_dir / path;
            c.noise = NoiseSpec::replay_values(load_replay_path(path, c.grid), path.lexically_normal().string());
        } else {
            throw ConfigError("unknown common_noise.kind '" + *v + "'");
        }
    }
    if (auto v = get("coupling")) c.coupling = parse_coupling(*v);
    if (auto v = get("seed")) c.seed = text::parse_uint(*v, "seed");
    return c;
}

SimConfig load_config(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path(), warnings);
}

std::string serialize_config(const SimConfig& cfg) {
    std::string s;
    for (const auto& [k, v] : canonical_fields(cfg)) s += k + " = " + v + "\n";
    return s;
}

std::string config_digest(const SimConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : serialize_config(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> config_field_diff(const SimConfig& a, const SimConfig& b) {
    std::map<std::string, std::string> fa;
    for (auto& [k, v] : canonical_fields(a)) fa[k] = v;
    std::map<std::string, std::string> fb;
    for (auto& [k, v] : canonical_fields(b)) fb[k] = v;
    std::vector<std::string> out;
    for (const auto& [k, v] : fa)
        if (auto it = fb.find(k); it == fb.end() || it->second != v) out.push_back(k);
    for (const auto& [k, v] : fb)
        if (!fa.count(k)) out.push_back(k);
    return out;
}

}  // namespace mvsim
