#pragma once

#include "camxref/geo.hpp"
#include "camxref/time.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace camxref::social {

/// Admissible area and time span for posts; both closed.
struct StudyWindow {
    geo::BoundingBox area;
    Timestamp start_ts;
    Timestamp end_ts;

    bool admits(const geo::GeoPoint& p, Timestamp ts) const;
    /// Throws ValidationError on an inverted box or start >= end.
    void validate() const;
};

/// 24N..30N, 87W..79W from 2017-08-20 through the end of 2017-09-13 UTC.
StudyWindow default_study_window();

enum class Platform { twitter, instagram };

std::string_view to_string(Platform p);

struct SocialPost {
    std::string post_id;
    Platform platform = Platform::twitter;
    Timestamp ts_utc;
    geo::GeoPoint point;
    std::string text;
    bool has_image = false;

    friend bool operator==(const SocialPost&, const SocialPost&) = default;
};

std::string to_jsonl(const SocialPost& post);

namespace reason {
inline constexpr std::string_view malformed_json = "malformed_json";
inline constexpr std::string_view unknown_platform = "unknown_platform";
inline constexpr std::string_view missing_geotag = "missing_geotag";
inline constexpr std::string_view invalid_field = "invalid_field";
inline constexpr std::string_view duplicate_post_id = "duplicate_post_id";
inline constexpr std::string_view out_of_area = "out_of_area";
inline constexpr std::string_view out_of_window = "out_of_window";
} // namespace reason

struct RejectionReport {
    std::size_t lines = 0; // non-blank input lines
    std::size_t accepted = 0;
    std::map<std::string, std::size_t, std::less<>> by_reason;

    std::size_t rejected() const;
    std::string to_json() const;
    /// One `reason: count` line per reason, for stderr.
    std::string summary() const;
};

struct ParseResult {
    std::vector<SocialPost> posts;
    RejectionReport report;
};

/// Reads posts JSONL, keeping posts inside `window`. Out-of-area and
/// out-of-window posts are always dropped and counted. With `strict`, any
/// malformed line (bad JSON, unknown platform, missing geotag, bad field,
/// duplicate id) throws ValidationError naming the line; otherwise it is
/// counted and skipped.
ParseResult parse_posts_text(std::string_view text, const StudyWindow& window, bool strict);
ParseResult parse_posts(const std::filesystem::path& path, const StudyWindow& window, bool strict);

/// Simple Unicode case folding of UTF-8 text (invalid bytes pass through).
std::u32string casefold(std::string_view utf8);

/// Case-insensitive substring match against any of a set of terms.
class KeywordFilter {
public:
    /// Throws ValidationError if `terms` is empty or holds an empty term.
    explicit KeywordFilter(std::vector<std::string> terms);

    bool matches(std::string_view text) const;
    const std::vector<std::string>& terms() const { return terms_; }

private:
    std::vector<std::string> terms_;
    std::vector<std::u32string> folded_;
};

bool keyword_match(std::string_view text, std::string_view term);

/// Order-preserving subset of posts whose text matches.
std::vector<SocialPost> filter_posts(std::span<const SocialPost> posts,
                                     const KeywordFilter& filter);
std::vector<SocialPost> filter_posts(std::span<const SocialPost> posts, std::string_view term);

} // namespace camxref::social
