#pragma once

#include "camxref/crossref.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace camxref::report {

enum class Format { csv, markdown };

/// Report layout: city, coordinates, window, camera count, then each funnel
/// stage across all scales. The last row is labelled "Total"; a
/// "Total (unique)" row follows when dedup totals are present.
/// Output is byte-stable for a given table.
std::string render(const crossref::ReportTable& table, Format format);

/// round-half-away-from-zero of 10^digits * 100 * num / den, i.e. a
/// percentage in fixed point. nullopt when den == 0.
std::optional<std::int64_t> percent_fixed(std::int64_t num, std::int64_t den, int digits);

/// "10.3", "0.32", or "n/a".
std::string format_percent(std::optional<std::int64_t> fixed, int digits);

struct ScalePercentage {
    double scale_miles = 0.0;
    std::int64_t relevant = 0;
    std::int64_t total = 0;
    std::optional<std::int64_t> tenths; // nullopt when total == 0
};

/// Totals-row relevant / total per scale, in tenths of a percent.
std::vector<ScalePercentage> relevance_percentages(const crossref::ReportTable& table);

enum class Column { total, keyword, keyword_instagram, relevant };

std::string_view to_string(Column c);
std::int64_t pick(const crossref::FunnelCounts& f, Column c);

struct CityShare {
    std::string city;
    std::int64_t count = 0;
    std::optional<double> fraction;            // nullopt when the column total is 0
    std::optional<std::int64_t> hundredths_pct; // percentage rounded to 2 decimals
};

/// Each city's share of one column's totals-row value at `scale_index`.
/// Rows of the same city are summed; cities keep first-appearance order.
std::vector<CityShare> city_share(const crossref::ReportTable& table, std::size_t scale_index,
                                  Column column);

/// Percentages and per-city shares for every scale and column.
std::string stats_json(const crossref::ReportTable& table);

} // namespace camxref::report
