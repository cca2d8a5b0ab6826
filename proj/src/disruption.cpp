#include "camxref/disruption.hpp"

#include "camxref/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <tuple>

namespace camxref::disruption {

void DisruptionParams::validate() const
{
    if (min_frozen_run < 2 || min_gap_run < 2) {
        throw ValidationError("min_frozen_run and min_gap_run must both be at least 2");
    }
}

std::string_view to_string(Cause c) { return c == Cause::gap ? "gap" : "frozen"; }

Cause cause_from_string(std::string_view s)
{
    if (s == "gap") {
        return Cause::gap;
    }
    if (s == "frozen") {
        return Cause::frozen;
    }
    throw ValidationError("unknown disruption cause '" + std::string(s) + "'");
}

std::vector<DisruptionInterval> detect_disruptions(std::span<const feed::FrameRecord> frames,
                                                   const DisruptionParams& params)
{
    params.validate();
    for (std::size_t i = 1; i < frames.size(); ++i) {
        if (frames[i].camera_id != frames[0].camera_id) {
            throw ValidationError("detect_disruptions expects frames of a single camera");
        }
        if (!(frames[i - 1].ts_utc < frames[i].ts_utc)) {
            throw ValidationError("frames for camera '" + frames[i].camera_id +
                                  "' are not strictly time-ordered at " +
                                  format_rfc3339(frames[i].ts_utc));
        }
    }

    std::vector<DisruptionInterval> out;
    std::size_t i = 0;
    while (i < frames.size()) {
        std::size_t j = i + 1;
        if (!frames[i].payload) {
            while (j < frames.size() && !frames[j].payload) {
                ++j;
            }
            if (static_cast<int>(j - i) >= params.min_gap_run) {
                out.push_back({frames[i].camera_id, frames[i].ts_utc, frames[j - 1].ts_utc,
                               Cause::gap});
            }
        } else {
            const auto& digest = frames[i].payload->digest;
            while (j < frames.size() && frames[j].payload && frames[j].payload->digest == digest) {
                ++j;
            }
            if (static_cast<int>(j - i) >= params.min_frozen_run) {
                out.push_back({frames[i].camera_id, frames[i + 1].ts_utc, frames[j - 1].ts_utc,
                               Cause::frozen});
            }
        }
        i = j;
    }
    return out;
}

std::vector<DisruptionInterval> detect_all(const feed::FrameStreams& streams,
                                           const DisruptionParams& params)
{
    std::vector<DisruptionInterval> all;
    for (const auto& [id, frames] : streams) {
        auto found = detect_disruptions(frames, params);
        all.insert(all.end(), found.begin(), found.end());
    }
    return all;
}

std::optional<DisruptionInterval> select_interval(std::span<const DisruptionInterval> intervals,
                                                  const EventWindow& window)
{
    std::optional<DisruptionInterval> best;
    for (const auto& iv : intervals) {
        if (iv.start_ts > window.end || iv.end_ts < window.start) {
            continue;
        }
        if (!best) {
            best = iv;
            continue;
        }
        const auto len = iv.end_ts - iv.start_ts;
        const auto best_len = best->end_ts - best->start_ts;
        if (len > best_len || (len == best_len && iv.start_ts < best->start_ts)) {
            best = iv;
        }
    }
    return best;
}

std::map<std::string, DisruptionInterval>
select_per_camera(std::span<const DisruptionInterval> intervals,
                  const std::optional<EventWindow>& window)
{
    std::map<std::string, std::vector<DisruptionInterval>> by_camera;
    for (const auto& iv : intervals) {
        by_camera[iv.camera_id].push_back(iv);
    }
    const EventWindow all{Timestamp::min(), Timestamp::max()};
    std::map<std::string, DisruptionInterval> chosen;
    for (const auto& [id, list] : by_camera) {
        if (auto best = select_interval(list, window.value_or(all))) {
            chosen.emplace(id, *best);
        }
    }
    return chosen;
}

std::string city_slug(std::string_view city)
{
    std::string slug;
    bool dash = false;
    for (unsigned char c : city) {
        if (std::isalnum(c)) {
            if (dash && !slug.empty()) {
                slug.push_back('-');
            }
            dash = false;
            slug.push_back(static_cast<char>(std::tolower(c)));
        } else {
            dash = true;
        }
    }
    return slug.empty() ? "group" : slug;
}

std::vector<CameraGroup> group_cameras(std::span<const feed::CameraRecord> cameras,
                                       const std::map<std::string, DisruptionInterval>& chosen)
{
    for (const auto& [id, iv] : chosen) {
        const bool known = std::any_of(cameras.begin(), cameras.end(),
                                       [&](const auto& c) { return c.camera_id == id; });
        if (!known) {
            throw ValidationError("disruption refers to unknown camera '" + id + "'");
        }
    }

    using Key = std::tuple<double, double, Timestamp, Timestamp>;
    std::map<Key, std::size_t> index;
    std::vector<CameraGroup> groups;
    for (const auto& cam : cameras) {
        const auto it = chosen.find(cam.camera_id);
        if (it == chosen.end()) {
            continue;
        }
        const Key key{cam.location.lat_deg, cam.location.lon_deg, it->second.start_ts,
                      it->second.end_ts};
        const auto [slot, inserted] = index.emplace(key, groups.size());
        if (inserted) {
            groups.push_back({"", cam.city, cam.location, it->second.start_ts, it->second.end_ts,
                              {cam.camera_id}});
            continue;
        }
        auto& g = groups[slot->second];
        if (g.city != cam.city) {
            throw ValidationError("camera '" + cam.camera_id + "' (city '" + cam.city +
                                  "') shares coordinates and disruption window with city '" +
                                  g.city + "'");
        }
        g.camera_ids.push_back(cam.camera_id);
    }

    std::map<std::string, std::vector<CameraGroup*>> by_city;
    for (auto& g : groups) {
        by_city[g.city].push_back(&g);
    }
    std::map<std::string, int> slug_counts;
    for (auto& [city, members] : by_city) {
        std::stable_sort(members.begin(), members.end(), [](const auto* a, const auto* b) {
            return std::tie(a->center.lat_deg, a->center.lon_deg, a->start_ts, a->end_ts) <
                   std::tie(b->center.lat_deg, b->center.lon_deg, b->start_ts, b->end_ts);
        });
        const auto slug = city_slug(city);
        for (auto* g : members) {
            g->group_id = slug + "-" + std::to_string(++slug_counts[slug]);
        }
    }
    return groups;
}

namespace {

const nlohmann::json& field(const nlohmann::json& obj, const char* key, std::size_t index)
{
    if (!obj.contains(key)) {
        throw ValidationError("entry " + std::to_string(index) + ": missing '" + key + "'");
    }
    return obj.at(key);
}

std::string string_field(const nlohmann::json& obj, const char* key, std::size_t index)
{
    const auto& v = field(obj, key, index);
    if (!v.is_string()) {
        throw ValidationError("entry " + std::to_string(index) + ": '" + key +
                              "' must be a string");
    }
    return v.get<std::string>();
}

double number_field(const nlohmann::json& obj, const char* key, std::size_t index)
{
    const auto& v = field(obj, key, index);
    if (!v.is_number()) {
        throw ValidationError("entry " + std::to_string(index) + ": '" + key +
                              "' must be a number");
    }
    return v.get<double>();
}

nlohmann::json parse_array(std::string_view text, const char* what)
{
    auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_array()) {
        throw ValidationError(std::string(what) + " must be a JSON array");
    }
    return j;
}

} // namespace

std::string format_disruptions_json(std::span<const DisruptionInterval> intervals)
{
    auto arr = nlohmann::ordered_json::array();
    for (const auto& iv : intervals) {
        nlohmann::ordered_json j;
        j["camera_id"] = iv.camera_id;
        j["start_ts"] = format_rfc3339(iv.start_ts);
        j["end_ts"] = format_rfc3339(iv.end_ts);
        j["cause"] = to_string(iv.cause);
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::vector<DisruptionInterval> parse_disruptions_json(std::string_view text)
{
    const auto arr = parse_array(text, "disruptions file");
    std::vector<DisruptionInterval> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& j = arr[i];
        DisruptionInterval iv;
        iv.camera_id = string_field(j, "camera_id", i);
        iv.start_ts = parse_rfc3339_or_throw(string_field(j, "start_ts", i), "start_ts");
        iv.end_ts = parse_rfc3339_or_throw(string_field(j, "end_ts", i), "end_ts");
        iv.cause = cause_from_string(string_field(j, "cause", i));
        if (iv.end_ts < iv.start_ts) {
            throw ValidationError("entry " + std::to_string(i) + ": end_ts precedes start_ts");
        }
        out.push_back(std::move(iv));
    }
    return out;
}

std::string format_groups_json(std::span<const CameraGroup> groups)
{
    auto arr = nlohmann::ordered_json::array();
    for (const auto& g : groups) {
        nlohmann::ordered_json j;
        j["group_id"] = g.group_id;
        j["city"] = g.city;
        j["lat"] = g.center.lat_deg;
        j["lon"] = g.center.lon_deg;
        j["start_ts"] = format_rfc3339(g.start_ts);
        j["end_ts"] = format_rfc3339(g.end_ts);
        j["camera_ids"] = g.camera_ids;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::vector<CameraGroup> parse_groups_json(std::string_view text)
{
    const auto arr = parse_array(text, "groups file");
    std::vector<CameraGroup> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& j = arr[i];
        CameraGroup g;
        g.group_id = string_field(j, "group_id", i);
        g.city = string_field(j, "city", i);
        g.center = {number_field(j, "lat", i), number_field(j, "lon", i)};
        if (!geo::is_valid(g.center)) {
            throw ValidationError("entry " + std::to_string(i) + ": invalid lat/lon");
        }
        g.start_ts = parse_rfc3339_or_throw(string_field(j, "start_ts", i), "start_ts");
        g.end_ts = parse_rfc3339_or_throw(string_field(j, "end_ts", i), "end_ts");
        if (g.end_ts < g.start_ts) {
            throw ValidationError("entry " + std::to_string(i) + ": end_ts precedes start_ts");
        }
        const auto& ids = field(j, "camera_ids", i);
        if (!ids.is_array() || ids.empty()) {
            throw ValidationError("entry " + std::to_string(i) +
                                  ": camera_ids must be a non-empty array");
        }
        for (const auto& id : ids) {
            if (!id.is_string()) {
                throw ValidationError("entry " + std::to_string(i) +
                                      ": camera_ids must hold strings");
            }
            g.camera_ids.push_back(id.get<std::string>());
        }
        out.push_back(std::move(g));
    }
    return out;
}

} // namespace camxref::disruption
