#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace camxref::text {

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Whole-string numeric parses; nullopt on trailing junk or overflow.
std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

/// Shortest representation that round-trips (`26.26`, `2`, `-81.62`).
std::string format_double(double v);

} // namespace camxref::text
