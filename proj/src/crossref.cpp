#include "camxref/crossref.hpp"

#include "camxref/csv.hpp"
#include "camxref/error.hpp"
#include "camxref/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

namespace camxref::crossref {

std::vector<LabelRecord> parse_labels_csv(std::string_view text)
{
    const auto rows = csv::parse(text);
    if (rows.empty() || rows.front().fields.size() != 2 ||
        text::trim(rows.front().fields[0]) != "post_id" ||
        text::trim(rows.front().fields[1]) != "relevant") {
        throw ValidationError("labels file must start with header 'post_id,relevant'");
    }
    std::vector<LabelRecord> out;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const auto where = "labels line " + std::to_string(row.line_number) + ": ";
        if (row.fields.size() != 2) {
            throw ValidationError(where + "expected 2 fields");
        }
        LabelRecord rec;
        rec.post_id = std::string(text::trim(row.fields[0]));
        std::string value(text::trim(row.fields[1]));
        std::transform(value.begin(), value.end(), value.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (rec.post_id.empty()) {
            throw ValidationError(where + "empty post_id");
        }
        if (value == "true") {
            rec.relevant = true;
        } else if (value != "false") {
            throw ValidationError(where + "relevant must be true or false");
        }
        if (!seen.insert(rec.post_id).second) {
            throw ValidationError(where + "duplicate post_id '" + rec.post_id + "'");
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::string format_labels_csv(std::span<const LabelRecord> labels)
{
    std::string out = "post_id,relevant\n";
    for (const auto& l : labels) {
        out += csv::escape(l.post_id) + (l.relevant ? ",true\n" : ",false\n");
    }
    return out;
}

Labels to_labels(std::span<const LabelRecord> records)
{
    Labels out;
    for (const auto& r : records) {
        out[r.post_id] = r.relevant;
    }
    return out;
}

std::vector<std::string> unknown_label_ids(std::span<const LabelRecord> labels,
                                           std::span<const social::SocialPost> posts)
{
    std::unordered_set<std::string_view> ids;
    for (const auto& p : posts) {
        ids.insert(p.post_id);
    }
    std::vector<std::string> out;
    for (const auto& l : labels) {
        if (ids.count(l.post_id) == 0) {
            out.push_back(l.post_id);
        }
    }
    return out;
}

FunnelCounts& FunnelCounts::operator+=(const FunnelCounts& o)
{
    total += o.total;
    keyword += o.keyword;
    keyword_instagram += o.keyword_instagram;
    relevant += o.relevant;
    return *this;
}

bool is_monotone(const FunnelCounts& f)
{
    return f.total >= f.keyword && f.keyword >= f.keyword_instagram &&
           f.keyword_instagram >= f.relevant && f.relevant >= 0;
}

PostIndex::PostIndex(std::span<const social::SocialPost> posts) : posts_(posts)
{
    order_.resize(posts.size());
    for (std::size_t i = 0; i < posts.size(); ++i) {
        order_[i] = i;
        by_id_.emplace(posts[i].post_id, i);
    }
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
        if (posts[a].ts_utc != posts[b].ts_utc) {
            return posts[a].ts_utc < posts[b].ts_utc;
        }
        return posts[a].post_id < posts[b].post_id;
    });
}

const social::SocialPost* PostIndex::find(std::string_view post_id) const
{
    const auto it = by_id_.find(post_id);
    return it == by_id_.end() ? nullptr : &posts_[it->second];
}

MatchSet spatiotemporal_join(const disruption::CameraGroup& group, const geo::CatchmentScale& scale,
                             const PostIndex& index)
{
    const auto box = geo::bounding_box(group.center, scale);
    const auto& order = index.order();
    const auto posts = index.posts();
    auto first = std::lower_bound(order.begin(), order.end(), group.start_ts,
                                  [&](std::size_t i, Timestamp t) { return posts[i].ts_utc < t; });
    MatchSet out{group.group_id, scale.side_miles(), {}};
    for (auto it = first; it != order.end() && posts[*it].ts_utc <= group.end_ts; ++it) {
        if (geo::contains(box, posts[*it].point)) {
            out.post_ids.push_back(posts[*it].post_id);
        }
    }
    return out;
}

namespace {

FunnelCounts count_post(const social::SocialPost& post, const social::KeywordFilter& filter,
                        const Labels& labels)
{
    FunnelCounts c;
    c.total = 1;
    if (!filter.matches(post.text)) {
        return c;
    }
    c.keyword = 1;
    if (post.platform != social::Platform::instagram || !post.has_image) {
        return c;
    }
    c.keyword_instagram = 1;
    const auto it = labels.find(post.post_id);
    c.relevant = (it != labels.end() && it->second) ? 1 : 0;
    return c;
}

} // namespace

FunnelCounts funnel(const MatchSet& match, const PostIndex& index,
                    const social::KeywordFilter& filter, const Labels& labels)
{
    FunnelCounts counts;
    for (const auto& id : match.post_ids) {
        if (const auto* post = index.find(id)) {
            counts += count_post(*post, filter, labels);
        }
    }
    return counts;
}

void validate_scales(std::span<const double> scales_miles)
{
    if (scales_miles.empty()) {
        throw ValidationError("at least one catchment scale is required");
    }
    for (std::size_t i = 0; i < scales_miles.size(); ++i) {
        geo::CatchmentScale{scales_miles[i]};
        if (i > 0 && !(scales_miles[i - 1] < scales_miles[i])) {
            throw ValidationError("catchment scales must be strictly increasing");
        }
    }
}

AggregateResult aggregate(std::span<const disruption::CameraGroup> groups,
                          std::span<const double> scales_miles,
                          std::span<const social::SocialPost> posts,
                          const social::KeywordFilter& filter, const Labels& labels,
                          const AggregateOptions& options)
{
    validate_scales(scales_miles);
    const PostIndex index(posts);

    AggregateResult result;
    auto& table = result.table;
    table.scales_miles.assign(scales_miles.begin(), scales_miles.end());
    table.totals.assign(scales_miles.size(), FunnelCounts{});
    std::vector<std::set<std::string>> unique(scales_miles.size());

    for (const auto& g : groups) {
        ReportRow row{g.group_id,
                      g.city,
                      g.center,
                      g.start_ts,
                      g.end_ts,
                      static_cast<std::int64_t>(g.camera_ids.size()),
                      {}};
        for (std::size_t s = 0; s < scales_miles.size(); ++s) {
            auto match = spatiotemporal_join(g, geo::CatchmentScale{scales_miles[s]}, index);
            const auto counts = funnel(match, index, filter, labels);
            row.funnel_by_scale.push_back(counts);
            table.totals[s] += counts;
            if (options.dedup) {
                unique[s].insert(match.post_ids.begin(), match.post_ids.end());
            }
            if (options.keep_matches) {
                result.matches.push_back(std::move(match));
            }
        }
        table.total_cameras += row.cameras_in_group;
        table.rows.push_back(std::move(row));
    }

    if (options.dedup) {
        std::vector<FunnelCounts> uniq;
        for (const auto& ids : unique) {
            MatchSet all{"*", 0.0, {ids.begin(), ids.end()}};
            uniq.push_back(funnel(all, index, filter, labels));
        }
        table.unique_totals = std::move(uniq);
    }
    return result;
}

std::string format_matches_jsonl(std::span<const MatchSet> matches)
{
    std::string out;
    for (const auto& m : matches) {
        for (const auto& id : m.post_ids) {
            nlohmann::ordered_json j;
            j["group_id"] = m.group_id;
            j["scale_miles"] = m.scale_miles;
            j["post_id"] = id;
            out += j.dump();
            out.push_back('\n');
        }
    }
    return out;
}

namespace {

nlohmann::ordered_json funnel_json(const FunnelCounts& f)
{
    nlohmann::ordered_json j;
    j["total"] = f.total;
    j["keyword"] = f.keyword;
    j["keyword_instagram"] = f.keyword_instagram;
    j["relevant"] = f.relevant;
    return j;
}

FunnelCounts funnel_from(const nlohmann::json& j)
{
    FunnelCounts f;
    f.total = j.at("total").get<std::int64_t>();
    f.keyword = j.at("keyword").get<std::int64_t>();
    f.keyword_instagram = j.at("keyword_instagram").get<std::int64_t>();
    f.relevant = j.at("relevant").get<std::int64_t>();
    return f;
}

nlohmann::ordered_json funnels_json(const std::vector<FunnelCounts>& v)
{
    auto arr = nlohmann::ordered_json::array();
    for (const auto& f : v) {
        arr.push_back(funnel_json(f));
    }
    return arr;
}

std::vector<FunnelCounts> funnels_from(const nlohmann::json& arr)
{
    std::vector<FunnelCounts> out;
    for (const auto& f : arr) {
        out.push_back(funnel_from(f));
    }
    return out;
}

} // namespace

std::string table_to_json(const ReportTable& table)
{
    nlohmann::ordered_json j;
    j["scales_miles"] = table.scales_miles;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : table.rows) {
        nlohmann::ordered_json row;
        row["group_id"] = r.group_id;
        row["city"] = r.city;
        row["lat"] = r.center.lat_deg;
        row["lon"] = r.center.lon_deg;
        row["start_ts"] = format_rfc3339(r.start_ts);
        row["end_ts"] = format_rfc3339(r.end_ts);
        row["cameras_in_group"] = r.cameras_in_group;
        row["funnel_by_scale"] = funnels_json(r.funnel_by_scale);
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    j["total_cameras"] = table.total_cameras;
    j["totals"] = funnels_json(table.totals);
    if (table.unique_totals) {
        j["unique_totals"] = funnels_json(*table.unique_totals);
    }
    return j.dump(2) + "\n";
}

ReportTable table_from_json(std::string_view text)
{
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ValidationError("report table must be a JSON object");
    }
    try {
        ReportTable t;
        t.scales_miles = j.at("scales_miles").get<std::vector<double>>();
        for (const auto& r : j.at("rows")) {
            ReportRow row;
            row.group_id = r.at("group_id").get<std::string>();
            row.city = r.at("city").get<std::string>();
            row.center = {r.at("lat").get<double>(), r.at("lon").get<double>()};
            row.start_ts = parse_rfc3339_or_throw(r.at("start_ts").get<std::string>(), "start_ts");
            row.end_ts = parse_rfc3339_or_throw(r.at("end_ts").get<std::string>(), "end_ts");
            row.cameras_in_group = r.at("cameras_in_group").get<std::int64_t>();
            row.funnel_by_scale = funnels_from(r.at("funnel_by_scale"));
            if (row.funnel_by_scale.size() != t.scales_miles.size()) {
                throw ValidationError("row '" + row.group_id + "' has the wrong number of scales");
            }
            t.rows.push_back(std::move(row));
        }
        t.total_cameras = j.at("total_cameras").get<std::int64_t>();
        t.totals = funnels_from(j.at("totals"));
        if (j.contains("unique_totals")) {
            t.unique_totals = funnels_from(j.at("unique_totals"));
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed report table: ") + e.what());
    }
}

} // namespace camxref::crossref
