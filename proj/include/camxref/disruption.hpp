#pragma once

#include "camxref/camera_feed.hpp"
#include "camxref/geo.hpp"
#include "camxref/time.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace camxref::disruption {

struct DisruptionParams {
    /// Consecutive ok frames sharing one digest (the first copy included).
    int min_frozen_run = 3;
    /// Consecutive fetch_failed frames.
    int min_gap_run = 2;

    /// Throws ValidationError unless both thresholds are >= 2.
    void validate() const;
};

enum class Cause { gap, frozen };

std::string_view to_string(Cause c);
Cause cause_from_string(std::string_view s);

struct DisruptionInterval {
    std::string camera_id;
    Timestamp start_ts;
    Timestamp end_ts;
    Cause cause = Cause::gap;

    friend bool operator==(const DisruptionInterval&, const DisruptionInterval&) = default;
};

/// Finds outages in one camera's time-ordered frames.
///
/// A run of >= min_gap_run failed fetches is a gap spanning its first to last
/// failed frame. A run of >= min_frozen_run ok frames with one digest is a
/// freeze spanning the run's second frame (the first repeat; the first copy
/// was still fresh) to its last frame. Gap and frozen intervals are reported
/// separately even when adjacent.
///
/// Throws ValidationError if frames are not strictly increasing in time or
/// belong to more than one camera.
std::vector<DisruptionInterval> detect_disruptions(std::span<const feed::FrameRecord> frames,
                                                   const DisruptionParams& params);

/// Runs detection over every stream; output ordered by camera id then time.
std::vector<DisruptionInterval> detect_all(const feed::FrameStreams& streams,
                                           const DisruptionParams& params);

struct EventWindow {
    Timestamp start;
    Timestamp end;
};

/// Longest interval overlapping `window` (closed); ties go to the earlier start.
std::optional<DisruptionInterval> select_interval(std::span<const DisruptionInterval> intervals,
                                                  const EventWindow& window);

/// Picks one interval per camera with select_interval; cameras with no
/// overlapping interval are absent. Without a window, every interval is a
/// candidate.
std::map<std::string, DisruptionInterval>
select_per_camera(std::span<const DisruptionInterval> intervals,
                  const std::optional<EventWindow>& window);

struct CameraGroup {
    std::string group_id;
    std::string city;
    geo::GeoPoint center;
    Timestamp start_ts;
    Timestamp end_ts;
    std::vector<std::string> camera_ids;

    friend bool operator==(const CameraGroup&, const CameraGroup&) = default;
};

/// Partitions cameras with a chosen interval by (lat, lon, start, end).
/// Groups come out in order of their first member in `cameras`; ids are
/// `<city-slug>-<n>` with n counting that city's groups by latitude.
/// Throws ValidationError when members of one partition disagree on city or
/// a chosen interval names an unknown camera.
std::vector<CameraGroup> group_cameras(std::span<const feed::CameraRecord> cameras,
                                       const std::map<std::string, DisruptionInterval>& chosen);

std::string city_slug(std::string_view city);

std::string format_disruptions_json(std::span<const DisruptionInterval> intervals);
std::vector<DisruptionInterval> parse_disruptions_json(std::string_view text);

std::string format_groups_json(std::span<const CameraGroup> groups);
std::vector<CameraGroup> parse_groups_json(std::string_view text);

} // namespace camxref::disruption
