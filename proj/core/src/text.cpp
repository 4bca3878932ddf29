#include "mvsim/text.hpp"

#include <charconv>
#include <cstdio>

#include "mvsim/errors.hpp"

namespace mvsim::text {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_short(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double parse_double(std::string_view s, std::string_view what) {
    s = trim(s);
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty())
        throw ConfigError(std::string(what) + " must be a number (got '" + std::string(s) + "')");
    return v;
}

unsigned long long parse_uint(std::string_view s, std::string_view what) {
    s = trim(s);
    unsigned long long v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty()) {
        // Accept integral values written in floating notation, e.g. 1e5.
        const double d = parse_double(s, what);
        if (!(d >= 0.0) || d != static_cast<double>(static_cast<unsigned long long>(d)))
            throw ConfigError(std::string(what) + " must be a nonnegative integer");
        return static_cast<unsigned long long>(d);
    }
    return v;
}

std::string_view trim(std::string_view s) noexcept {
    const auto* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, std::string_view delims) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto next = s.find_first_of(delims, pos);
        const auto tok = s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
        if (!tok.empty()) out.push_back(tok);
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

}  // namespace mvsim::text
