#include "camxref/csv.hpp"
#include "camxref/report.hpp"
#include "camxref/text.hpp"
#include "support.hpp"

#include <doctest.h>

#include <json.hpp>

using namespace camxref;
using namespace camxref::report;
using crossref::FunnelCounts;

namespace {

crossref::ReportTable naples_table()
{
    crossref::ReportTable t;
    t.scales_miles = {2, 10, 20};
    crossref::ReportRow r;
    r.group_id = "naples-1";
    r.city = "Naples";
    r.center = {26.26, -81.62};
    r.start_ts = make_utc(2017, 9, 10, 17, 45);
    r.end_ts = make_utc(2017, 9, 12, 2, 45);
    r.cameras_in_group = 2;
    r.funnel_by_scale = {{0, 0, 0, 0}, {0, 0, 0, 0}, {10, 7, 7, 5}};
    t.rows.push_back(r);
    t.total_cameras = 2;
    t.totals = r.funnel_by_scale;
    return t;
}

} // namespace

TEST_CASE("percentage rounding")
{
    // Independent oracle: round-half-away on exact rationals.
    auto oracle = [](std::int64_t n, std::int64_t d, std::int64_t scale) {
        const std::int64_t q = n * scale * 100;
        return (2 * q + d) / (2 * d);
    };
    CHECK(percent_fixed(11, 107, 1) == 103);
    CHECK(percent_fixed(110, 1002, 1) == 110);
    CHECK(percent_fixed(411, 3089, 1) == 133);
    CHECK(format_percent(percent_fixed(11, 107, 1), 1) == "10.3");
    CHECK(format_percent(percent_fixed(110, 1002, 1), 1) == "11.0");
    CHECK(format_percent(percent_fixed(10, 3089, 2), 2) == "0.32");
    CHECK(format_percent(percent_fixed(1, 2000, 1), 1) == "0.1");
    CHECK(format_percent(std::nullopt, 1) == "n/a");
    CHECK_FALSE(percent_fixed(1, 0, 1));
    testing::Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const auto d = testing::uniform(rng, 1, 100000);
        const auto n = testing::uniform(rng, 0, d);
        CHECK(percent_fixed(n, d, 1) == oracle(n, d, 10));
    }
}

TEST_CASE("CSV layout")
{
    const auto csv_text = render(naples_table(), Format::csv);
    const auto rows = csv::parse(csv_text);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].fields.size() == 18);
    CHECK(csv::join(rows[1].fields) ==
          "Naples,26.26,-81.62,2017-09-10T17:45:00Z,2017-09-12T02:45:00Z,2,0,0,10,0,0,7,0,0,7,0,0,5");
    CHECK(rows[2].fields[0] == "Total");
    CHECK(render(naples_table(), Format::csv) == csv_text);
    CHECK(render(naples_table(), Format::markdown).find("| Naples | 26.26 | -81.62 | 9/10/17 17:45 | 9/12/17 2:45 |") !=
          std::string::npos);
}

TEST_CASE("empty table renders header and zero totals")
{
    crossref::ReportTable t;
    t.scales_miles = {2, 10, 20};
    t.totals.resize(3);
    const auto rows = csv::parse(render(t, Format::csv));
    REQUIRE(rows.size() == 2);
    CHECK(csv::join(rows[1].fields) == "Total,,,,,0,0,0,0,0,0,0,0,0,0,0,0,0");
    CHECK(nlohmann::json::parse(stats_json(t))["relevance_pct"][0]["pct"] == "n/a");
}

TEST_CASE("city shares")
{
    auto t = naples_table();
    auto shares = city_share(t, 2, Column::total);
    REQUIRE(shares.size() == 1);
    CHECK(shares[0].hundredths_pct == 10000);

    // Naples' share of all posts at 20 mi in the full table.
    auto other = t.rows[0];
    other.city = "Elsewhere";
    other.funnel_by_scale[2] = {3079, 0, 0, 0};
    t.rows.push_back(other);
    t.totals[2] = {3089, 7, 7, 5};
    shares = city_share(t, 2, Column::total);
    CHECK(format_percent(shares[0].hundredths_pct, 2) == "0.32");
    std::int64_t sum = 0;
    for (const auto& s : shares) {
        sum += *s.hundredths_pct;
    }
    CHECK(std::abs(sum - 10000) <= 10);
}

TEST_CASE("stats agree with an independent read of the CSV")
{
    testing::Rng rng(23);
    const std::vector<double> scales{2, 10, 20};
    const auto groups = testing::random_groups(rng, 4);
    const auto posts = testing::random_posts(rng, groups, scales, 2000);
    crossref::Labels labels;
    for (const auto& p : posts) {
        labels[p.post_id] = testing::uniform(rng, 0, 1) == 1;
    }
    const auto t = crossref::aggregate(groups, scales, posts, social::KeywordFilter({"Irma"}), labels).table;
    const auto rows = csv::parse(render(t, Format::csv));
    const auto& total = rows.back().fields;
    const auto stats = nlohmann::json::parse(stats_json(t));
    for (std::size_t s = 0; s < 3; ++s) {
        const auto posts_n = *text::parse_int(total[6 + s]);
        const auto relevant_n = *text::parse_int(total[15 + s]);
        const auto& entry = stats["relevance_pct"][s];
        CHECK(entry["total"] == posts_n);
        CHECK(entry["relevant"] == relevant_n);
        if (posts_n > 0) {
            const double pct = entry["pct"].get<double>();
            CHECK(std::llround(pct * 10) == (2 * relevant_n * 1000 + posts_n) / (2 * posts_n));
        }
    }
}
