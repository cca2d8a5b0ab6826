#pragma once

#include "camxref/camera_feed.hpp"
#include "camxref/crossref.hpp"
#include "camxref/disruption.hpp"
#include "camxref/social.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace camxref::synth {

/// Count targets for one camera group: the cumulative funnel at every scale.
struct GroupTarget {
    std::string city;
    geo::GeoPoint center;
    Timestamp start_ts;
    Timestamp end_ts;
    int cameras_in_group = 1;
    std::vector<crossref::FunnelCounts> funnel_by_scale;
};

enum class Placement {
    /// Avoid posts that count for several groups wherever space and time allow.
    exclusive,
    /// Prefer posts in overlapping catchments so recounting actually happens.
    shared,
};

struct FixtureSpec {
    social::StudyWindow study = social::default_study_window();
    std::vector<double> scales_miles{2.0, 10.0, 20.0};
    std::string term = "Irma";
    /// Distinct keyword posts inside the study window, counting group posts.
    std::int64_t keyword_post_target = 0;
    /// Non-keyword posts in the study window but outside every catchment.
    std::int64_t background_posts = 0;
    /// Kept fraction of background posts, mimicking upstream sampling.
    double thinning_rate = 1.0;
    /// Posts outside the study area or time span (exercise rejection).
    std::int64_t outside_posts = 0;
    std::uint64_t seed = 42;
    Placement placement = Placement::exclusive;
    std::vector<GroupTarget> groups;
};

FixtureSpec parse_fixture_spec(std::string_view json_text);
FixtureSpec load_fixture_spec(const std::filesystem::path& path);
std::string format_fixture_spec(const FixtureSpec& spec);

enum class RepairPolicy {
    strict, // any inconsistent target is an error
    clamp,  // shrink inner funnel stages ring by ring until consistent
};

struct Fixture {
    std::vector<social::SocialPost> posts;
    std::vector<feed::CameraRecord> cameras;
    std::vector<disruption::DisruptionInterval> disruptions;
    std::vector<disruption::CameraGroup> groups;
    std::vector<crossref::LabelRecord> labels;
    /// Targets actually generated (differs from the spec only after a clamp).
    std::vector<GroupTarget> realized;
    /// Human-readable notes, one per clamped ring.
    std::vector<std::string> repairs;
    std::int64_t padding_keyword_posts = 0;
};

/// Checks count targets and returns the per-group targets to generate.
/// Under `strict` the first inconsistency throws ValidationError naming the
/// group and ring.
std::vector<GroupTarget> check_targets(const FixtureSpec& spec, RepairPolicy policy,
                                       std::vector<std::string>* repairs = nullptr);

/// Builds posts, registry, windows and labels so that the crossref pipeline
/// reproduces the (realized) targets exactly. Deterministic in spec + seed.
/// Throws ValidationError when a target cannot be placed.
Fixture generate_fixture(const FixtureSpec& spec, RepairPolicy policy = RepairPolicy::strict);

/// posts.jsonl, cameras.csv, disruptions.json, groups.json, labels.csv.
void write_fixture(const Fixture& fixture, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Camera simulator

enum class FeedMode { ok, freeze, gap };

struct ScheduleRange {
    std::int64_t from_tick = 0; // inclusive
    std::int64_t to_tick = 0;   // inclusive
    FeedMode mode = FeedMode::ok;
};

/// camera_id -> non-overlapping tick ranges; unlisted ticks are ok.
using FailureSchedule = std::map<std::string, std::vector<ScheduleRange>>;

FailureSchedule parse_schedule(std::string_view json_text);
std::string format_schedule(const FailureSchedule& schedule);

struct SimResponse {
    int status = 200;
    std::string body;
};

/// Stateless snapshot source: the answer is a pure function of camera and tick.
/// A freeze repeats the last fresh image before the range; a gap answers 503.
class SnapshotSimulator {
public:
    SnapshotSimulator(std::vector<feed::CameraRecord> cameras, FailureSchedule schedule,
                      std::chrono::seconds interval, Timestamp epoch);

    SimResponse respond(std::string_view camera_id, std::int64_t tick) const;
    /// Tick index for a wall-clock instant: floor((now - epoch) / interval).
    std::int64_t tick_at(std::chrono::system_clock::time_point now) const;
    /// Camera id served at a URL path, if any.
    std::optional<std::string> camera_for_path(std::string_view path) const;

    static std::string fresh_body(std::string_view camera_id, std::int64_t tick);

private:
    std::vector<feed::CameraRecord> cameras_;
    FailureSchedule schedule_;
    std::chrono::seconds interval_;
    Timestamp epoch_;
    std::map<std::string, std::string, std::less<>> path_to_camera_;
};

/// HTTP front end for a SnapshotSimulator, serving on 127.0.0.1 (or a given host).
class SimulatorServer {
public:
    explicit SimulatorServer(SnapshotSimulator sim);
    ~SimulatorServer();
    SimulatorServer(const SimulatorServer&) = delete;
    SimulatorServer& operator=(const SimulatorServer&) = delete;

    /// Binds and serves on a background thread. Port 0 picks a free port.
    /// Returns the bound port; throws IoError when binding fails.
    int start(const std::string& host, int port);
    /// Blocks serving on the calling thread.
    void run(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace camxref::synth
