#include "camxref/error.hpp"
#include "camxref/social.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cctype>

using namespace camxref;
using namespace camxref::social;

namespace {

std::string post_line(const std::string& id, const std::string& platform, const std::string& ts,
                      double lat, double lon, const std::string& text = "Irma")
{
    return R"({"post_id":")" + id + R"(","platform":")" + platform + R"(","ts_utc":")" + ts +
           R"(","lat":)" + std::to_string(lat) + R"(,"lon":)" + std::to_string(lon) +
           R"(,"text":")" + text + R"(","has_image":true})";
}

} // namespace

TEST_CASE("keyword matching")
{
    CHECK(keyword_match("Irma is coming", "Irma"));
    CHECK(keyword_match("#stormirma #swfl", "Irma"));
    CHECK_FALSE(keyword_match("lunch was a total mess", "Irma"));
    CHECK(keyword_match("IRMA", "irma"));
    CHECK(keyword_match("Ｉｒｍａ? no, ÉCOLE", "école"));
    CHECK_THROWS_AS(KeywordFilter({}), ValidationError);
    CHECK_THROWS_AS(KeywordFilter({""}), ValidationError);
    CHECK_THROWS_AS(filter_posts({}, ""), ValidationError);
    const KeywordFilter any({"irma", "flood"});
    CHECK(any.matches("street FLOODING"));
    CHECK_FALSE(any.matches("sunny"));
}

TEST_CASE("filter_posts keeps order and is idempotent")
{
    testing::Rng rng(3);
    const char* words[] = {"Irma", "irma!", "storm", "#HurricaneIrma", "calm", "IRM", "Ir ma"};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<SocialPost> posts;
        for (int i = 0; i < 40; ++i) {
            SocialPost p;
            p.post_id = std::to_string(i);
            p.text = std::string(words[testing::uniform(rng, 0, 6)]) + " " + words[testing::uniform(rng, 0, 6)];
            posts.push_back(p);
        }
        const auto once = filter_posts(posts, "Irma");
        CHECK(filter_posts(once, "Irma") == once);
        CHECK(std::is_sorted(once.begin(), once.end(), [](const auto& a, const auto& b) {
            return std::stoi(a.post_id) < std::stoi(b.post_id);
        }));
        auto upper = posts;
        for (auto& p : upper) {
            std::transform(p.text.begin(), p.text.end(), p.text.begin(),
                           [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        }
        for (std::size_t i = 0; i < posts.size(); ++i) {
            CHECK(keyword_match(posts[i].text, "Irma") == keyword_match(upper[i].text, "Irma"));
        }
    }
    CHECK(filter_posts({}, "Irma").empty());
}

TEST_CASE("study window")
{
    const auto w = default_study_window();
    CHECK(w.admits({30.0, -79.0}, make_utc(2017, 9, 13, 23, 59, 59)));
    CHECK(w.admits({24.0, -87.0}, make_utc(2017, 8, 20)));
    CHECK_FALSE(w.admits({31.0, -85.0}, make_utc(2017, 9, 10)));
    CHECK_FALSE(w.admits({26.0, -81.0}, make_utc(2017, 9, 14)));
    CHECK_FALSE(w.admits({26.0, -81.0}, make_utc(2017, 8, 19, 23, 59, 59)));
}

TEST_CASE("post ingestion")
{
    const auto w = default_study_window();
    const std::string text =
        post_line("1", "twitter", "2017-09-10T12:00:00Z", 26.0, -81.0) + "\n" +
        post_line("2", "facebook", "2017-09-10T12:00:00Z", 26.0, -81.0) + "\n" +
        post_line("3", "instagram", "2017-09-10T12:00:00Z", 31.0, -85.0) + "\n" +
        post_line("4", "instagram", "2017-10-10T12:00:00Z", 26.0, -81.0) + "\n" +
        "\n" + "{not json\n" +
        R"({"post_id":"5","platform":"twitter","ts_utc":"2017-09-10T12:00:00Z","text":"x","has_image":false})" + "\n" +
        post_line("1", "twitter", "2017-09-10T12:00:00Z", 26.0, -81.0) + "\n" +
        post_line("6", "instagram", "2017-09-10T08:00:00-04:00", 26.0, -81.0) + "\n";
    const auto r = parse_posts_text(text, w, false);
    REQUIRE(r.posts.size() == 2);
    CHECK(r.posts[1].ts_utc == make_utc(2017, 9, 10, 12));
    CHECK(r.report.lines == 8);
    CHECK(r.report.rejected() == 6);
    CHECK(r.report.by_reason.at(std::string(reason::unknown_platform)) == 1);
    CHECK(r.report.by_reason.at(std::string(reason::out_of_area)) == 1);
    CHECK(r.report.by_reason.at(std::string(reason::out_of_window)) == 1);
    CHECK(r.report.by_reason.at(std::string(reason::malformed_json)) == 1);
    CHECK(r.report.by_reason.at(std::string(reason::missing_geotag)) == 1);
    CHECK(r.report.by_reason.at(std::string(reason::duplicate_post_id)) == 1);
    CHECK_THROWS_WITH_AS(parse_posts_text(text, w, true), doctest::Contains("line 2"), ValidationError);
    // Out-of-area posts are dropped even in strict mode.
    CHECK(parse_posts_text(post_line("3", "instagram", "2017-09-10T12:00:00Z", 31.0, -85.0), w, true).posts.empty());
}

TEST_CASE("accepted posts round trip")
{
    SocialPost p{"x1", Platform::instagram, make_utc(2017, 9, 10), {26.5, -81.5}, "say \"Irma\"\n", true};
    const auto r = parse_posts_text(to_jsonl(p), default_study_window(), true);
    REQUIRE(r.posts.size() == 1);
    CHECK(r.posts[0] == p);
}
