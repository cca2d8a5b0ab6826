#pragma once

#include "camxref/disruption.hpp"
#include "camxref/geo.hpp"
#include "camxref/social.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace camxref::crossref {

struct LabelRecord {
    std::string post_id;
    bool relevant = false;
};

/// post_id -> relevant
using Labels = std::unordered_map<std::string, bool>;

/// Labels CSV with header `post_id,relevant`; relevant is true/false.
/// Throws ValidationError on bad rows or duplicate ids.
std::vector<LabelRecord> parse_labels_csv(std::string_view text);
std::string format_labels_csv(std::span<const LabelRecord> labels);
Labels to_labels(std::span<const LabelRecord> records);

/// Label ids that match no post, in label order.
std::vector<std::string> unknown_label_ids(std::span<const LabelRecord> labels,
                                           std::span<const social::SocialPost> posts);

/// The four-stage count: in window -> keyword -> Instagram image -> labelled relevant.
struct FunnelCounts {
    std::int64_t total = 0;
    std::int64_t keyword = 0;
    std::int64_t keyword_instagram = 0;
    std::int64_t relevant = 0;

    FunnelCounts& operator+=(const FunnelCounts& o);
    friend bool operator==(const FunnelCounts&, const FunnelCounts&) = default;
};

bool is_monotone(const FunnelCounts& f);

struct MatchSet {
    std::string group_id;
    double scale_miles = 0.0;
    std::vector<std::string> post_ids; // ordered by (ts, post_id)
};

/// Posts sorted by (ts, post_id) for windowed scans.
class PostIndex {
public:
    explicit PostIndex(std::span<const social::SocialPost> posts);

    std::span<const social::SocialPost> posts() const { return posts_; }
    /// Positions into posts(), in (ts, post_id) order.
    const std::vector<std::size_t>& order() const { return order_; }
    const social::SocialPost* find(std::string_view post_id) const;

private:
    std::span<const social::SocialPost> posts_;
    std::vector<std::size_t> order_;
    std::unordered_map<std::string_view, std::size_t> by_id_;
};

/// Posts inside bounding_box(group.center, scale) with ts in
/// [group.start_ts, group.end_ts], both constraints closed.
MatchSet spatiotemporal_join(const disruption::CameraGroup& group, const geo::CatchmentScale& scale,
                             const PostIndex& index);

/// Counts the funnel over a match set. Posts absent from the index are
/// skipped; unlabelled posts are not relevant.
FunnelCounts funnel(const MatchSet& match, const PostIndex& index,
                    const social::KeywordFilter& filter, const Labels& labels);

struct ReportRow {
    std::string group_id;
    std::string city;
    geo::GeoPoint center;
    Timestamp start_ts;
    Timestamp end_ts;
    std::int64_t cameras_in_group = 0;
    std::vector<FunnelCounts> funnel_by_scale; // parallel to ReportTable::scales_miles
};

struct ReportTable {
    std::vector<double> scales_miles;
    std::vector<ReportRow> rows;
    std::int64_t total_cameras = 0;
    /// Column-wise sum over rows: a post in two groups' boxes counts twice.
    std::vector<FunnelCounts> totals;
    /// Distinct-post totals, present when requested.
    std::optional<std::vector<FunnelCounts>> unique_totals;
};

/// Throws ValidationError unless scales are positive and strictly increasing.
void validate_scales(std::span<const double> scales_miles);

struct AggregateOptions {
    bool dedup = false;
    bool keep_matches = false;
};

struct AggregateResult {
    ReportTable table;
    std::vector<MatchSet> matches; // filled when keep_matches
};

/// One row per group (input order) with a funnel per scale, plus totals.
AggregateResult aggregate(std::span<const disruption::CameraGroup> groups,
                          std::span<const double> scales_miles,
                          std::span<const social::SocialPost> posts,
                          const social::KeywordFilter& filter, const Labels& labels,
                          const AggregateOptions& options = {});

/// `{group_id, scale_miles, post_id}` per line.
std::string format_matches_jsonl(std::span<const MatchSet> matches);

/// Lossless table serialisation used between the crossref and report stages.
std::string table_to_json(const ReportTable& table);
ReportTable table_from_json(std::string_view text);

} // namespace camxref::crossref
