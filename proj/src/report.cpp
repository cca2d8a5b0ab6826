#include "camxref/report.hpp"

#include "camxref/csv.hpp"
#include "camxref/text.hpp"

#include <json.hpp>

#include <algorithm>

namespace camxref::report {

namespace {

constexpr Column kColumns[] = {Column::total, Column::keyword, Column::keyword_instagram,
                               Column::relevant};

std::string csv_column_name(Column c)
{
    switch (c) {
    case Column::total:
        return "posts";
    case Column::keyword:
        return "keyword";
    case Column::keyword_instagram:
        return "instagram";
    case Column::relevant:
        return "relevant";
    }
    return {};
}

std::string md_column_name(Column c)
{
    switch (c) {
    case Column::total:
        return "# Posts";
    case Column::keyword:
        return "# Posts Filtered by Keyword";
    case Column::keyword_instagram:
        return "# Filtered Instagram Posts";
    case Column::relevant:
        return "# Relevant Instagram Posts";
    }
    return {};
}

using Grid = std::vector<std::vector<std::string>>;

Grid build_grid(const crossref::ReportTable& table, Format format)
{
    const bool csv = format == Format::csv;
    Grid grid;

    std::vector<std::string> header;
    if (csv) {
        header = {"city", "lat", "lon", "start_ts", "end_ts", "cameras_in_group"};
    } else {
        header = {"City",
                  "Camera Latitude",
                  "Camera Longitude",
                  "Disruption Start time",
                  "Disruption End time",
                  "Cameras in Group"};
    }
    for (const Column c : kColumns) {
        for (const double s : table.scales_miles) {
            const auto miles = text::format_double(s);
            header.push_back(csv ? csv_column_name(c) + "_" + miles + "mi"
                                 : md_column_name(c) + " " + miles + "mi × " + miles + "mi");
        }
    }
    grid.push_back(std::move(header));

    auto time = [&](Timestamp ts) { return csv ? format_rfc3339(ts) : format_short(ts); };
    auto counts = [&](std::vector<std::string>& row, const std::vector<crossref::FunnelCounts>& f) {
        for (const Column c : kColumns) {
            for (std::size_t s = 0; s < table.scales_miles.size(); ++s) {
                row.push_back(s < f.size() ? std::to_string(pick(f[s], c)) : "0");
            }
        }
    };

    for (const auto& r : table.rows) {
        std::vector<std::string> row{r.city,
                                     text::format_double(r.center.lat_deg),
                                     text::format_double(r.center.lon_deg),
                                     time(r.start_ts),
                                     time(r.end_ts),
                                     std::to_string(r.cameras_in_group)};
        counts(row, r.funnel_by_scale);
        grid.push_back(std::move(row));
    }

    std::vector<std::string> total{"Total", "", "", "", "", std::to_string(table.total_cameras)};
    counts(total, table.totals);
    grid.push_back(std::move(total));

    if (table.unique_totals) {
        std::vector<std::string> uniq{"Total (unique)", "", "", "", "", ""};
        counts(uniq, *table.unique_totals);
        grid.push_back(std::move(uniq));
    }
    return grid;
}

} // namespace

std::string render(const crossref::ReportTable& table, Format format)
{
    const Grid grid = build_grid(table, format);
    std::string out;
    if (format == Format::csv) {
        for (const auto& row : grid) {
            out += csv::join(row);
            out.push_back('\n');
        }
        return out;
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out += "|";
        for (const auto& cell : grid[i]) {
            out += " " + cell + " |";
        }
        out.push_back('\n');
        if (i == 0) {
            out += "|";
            for (std::size_t c = 0; c < grid[i].size(); ++c) {
                out += c < 6 && c != 5 ? " --- |" : " ---: |";
            }
            out.push_back('\n');
        }
    }
    return out;
}

std::optional<std::int64_t> percent_fixed(std::int64_t num, std::int64_t den, int digits)
{
    if (den == 0) {
        return std::nullopt;
    }
    std::int64_t scale = 100;
    for (int i = 0; i < digits; ++i) {
        scale *= 10;
    }
    // Exact integer rounding: half away from zero.
    const bool negative = (num < 0) != (den < 0);
    const std::int64_t n = (num < 0 ? -num : num) * scale;
    const std::int64_t d = den < 0 ? -den : den;
    const std::int64_t q = (2 * n + d) / (2 * d);
    return negative ? -q : q;
}

std::string format_percent(std::optional<std::int64_t> fixed, int digits)
{
    if (!fixed) {
        return "n/a";
    }
    std::int64_t scale = 1;
    for (int i = 0; i < digits; ++i) {
        scale *= 10;
    }
    const std::int64_t v = *fixed < 0 ? -*fixed : *fixed;
    std::string out = (*fixed < 0 ? "-" : "") + std::to_string(v / scale);
    if (digits > 0) {
        std::string frac = std::to_string(v % scale);
        out += "." + std::string(static_cast<std::size_t>(digits) - frac.size(), '0') + frac;
    }
    return out;
}

std::vector<ScalePercentage> relevance_percentages(const crossref::ReportTable& table)
{
    std::vector<ScalePercentage> out;
    for (std::size_t s = 0; s < table.scales_miles.size() && s < table.totals.size(); ++s) {
        const auto& t = table.totals[s];
        out.push_back({table.scales_miles[s], t.relevant, t.total,
                       percent_fixed(t.relevant, t.total, 1)});
    }
    return out;
}

std::string_view to_string(Column c)
{
    switch (c) {
    case Column::total:
        return "total";
    case Column::keyword:
        return "keyword";
    case Column::keyword_instagram:
        return "keyword_instagram";
    case Column::relevant:
        return "relevant";
    }
    return {};
}

std::int64_t pick(const crossref::FunnelCounts& f, Column c)
{
    switch (c) {
    case Column::total:
        return f.total;
    case Column::keyword:
        return f.keyword;
    case Column::keyword_instagram:
        return f.keyword_instagram;
    case Column::relevant:
        return f.relevant;
    }
    return 0;
}

std::vector<CityShare> city_share(const crossref::ReportTable& table, std::size_t scale_index,
                                  Column column)
{
    std::vector<CityShare> out;
    for (const auto& r : table.rows) {
        const auto v = pick(r.funnel_by_scale.at(scale_index), column);
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const CityShare& c) { return c.city == r.city; });
        if (it == out.end()) {
            out.push_back({r.city, v, std::nullopt, std::nullopt});
        } else {
            it->count += v;
        }
    }
    const auto den = pick(table.totals.at(scale_index), column);
    for (auto& c : out) {
        if (den != 0) {
            c.fraction = static_cast<double>(c.count) / static_cast<double>(den);
        }
        c.hundredths_pct = percent_fixed(c.count, den, 2);
    }
    return out;
}

namespace {

nlohmann::ordered_json pct_json(std::optional<std::int64_t> fixed, int digits)
{
    if (!fixed) {
        return "n/a";
    }
    return *text::parse_double(format_percent(fixed, digits));
}

} // namespace

std::string stats_json(const crossref::ReportTable& table)
{
    nlohmann::ordered_json j;
    auto rel = nlohmann::ordered_json::array();
    for (const auto& p : relevance_percentages(table)) {
        nlohmann::ordered_json e;
        e["scale_miles"] = p.scale_miles;
        e["relevant"] = p.relevant;
        e["total"] = p.total;
        e["pct"] = pct_json(p.tenths, 1);
        rel.push_back(std::move(e));
    }
    j["relevance_pct"] = std::move(rel);

    auto shares = nlohmann::ordered_json::array();
    for (const Column c : kColumns) {
        for (std::size_t s = 0; s < table.scales_miles.size(); ++s) {
            nlohmann::ordered_json e;
            e["column"] = to_string(c);
            e["scale_miles"] = table.scales_miles[s];
            e["denominator"] = pick(table.totals.at(s), c);
            auto cities = nlohmann::ordered_json::array();
            for (const auto& share : city_share(table, s, c)) {
                nlohmann::ordered_json ce;
                ce["city"] = share.city;
                ce["count"] = share.count;
                ce["pct"] = pct_json(share.hundredths_pct, 2);
                cities.push_back(std::move(ce));
            }
            e["cities"] = std::move(cities);
            shares.push_back(std::move(e));
        }
    }
    j["city_share"] = std::move(shares);
    return j.dump(2) + "\n";
}

} // namespace camxref::report
