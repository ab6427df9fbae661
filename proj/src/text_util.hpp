#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace evsizer::detail {

/// Shortest representation that round-trips.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

inline std::string format_optional(const std::optional<double>& x) { return x ? format_number(*x) : std::string(); }

inline std::string_view trim_view(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim_view(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(out)) return std::nullopt;
    return out;
}

inline std::optional<unsigned long long> parse_unsigned(std::string_view s) {
    s = trim_view(s);
    unsigned long long out = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return out;
}

} // namespace evsizer::detail
