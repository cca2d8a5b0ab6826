#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace camxref {

/// UTC instant with second precision. All timestamps in the toolkit use this.
using Timestamp = std::chrono::sys_seconds;

/// Parses an RFC 3339 timestamp such as `2017-09-10T17:45:00Z` or
/// `2017-09-10T13:45:00-04:00`; fractional seconds are truncated.
/// Returns nullopt on any syntax or range error.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

/// Like parse_rfc3339 but throws ValidationError naming `what`.
Timestamp parse_rfc3339_or_throw(std::string_view text, std::string_view what);

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_rfc3339(Timestamp ts);

/// Short table style, e.g. `9/10/17 17:45` (seconds appended only when non-zero).
std::string format_short(Timestamp ts);

Timestamp make_utc(int year, unsigned month, unsigned day, int hour = 0, int minute = 0,
                   int second = 0);

} // namespace camxref
