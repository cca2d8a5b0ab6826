#pragma once

#include "camxref/geo.hpp"
#include "camxref/time.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace camxref::feed {

struct Resolution {
    int width = 0;
    int height = 0;

    friend bool operator==(const Resolution&, const Resolution&) = default;
};

struct CameraRecord {
    std::string camera_id;
    std::string name;
    std::string city;
    geo::GeoPoint location;
    std::string snapshot_url;
    std::optional<Resolution> resolution;

    friend bool operator==(const CameraRecord&, const CameraRecord&) = default;
};

inline constexpr std::string_view kRegistryHeader =
    "camera_id,name,city,lat,lon,snapshot_url,width,height";

/// Parses registry CSV text. Camera ids must be unique and usable as a
/// directory name. When `study_area` is given every camera must lie in it.
std::vector<CameraRecord> parse_registry(std::string_view text,
                                         const std::optional<geo::BoundingBox>& study_area = {});
std::vector<CameraRecord> load_registry(const std::filesystem::path& path,
                                        const std::optional<geo::BoundingBox>& study_area = {});
std::string format_registry(const std::vector<CameraRecord>& cameras);

enum class FrameStatus { ok, fetch_failed };

/// Present exactly when the fetch succeeded.
struct FramePayload {
    std::string digest; // lowercase hex SHA-256 of the body
    std::uint64_t byte_size = 0;
    std::string image_path; // relative to the store root

    friend bool operator==(const FramePayload&, const FramePayload&) = default;
};

struct FrameRecord {
    std::string camera_id;
    Timestamp ts_utc;
    std::optional<FramePayload> payload;

    FrameStatus status() const { return payload ? FrameStatus::ok : FrameStatus::fetch_failed; }

    friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

/// One JSONL line (no trailing newline).
std::string to_jsonl(const FrameRecord& frame);
/// Throws ValidationError (without a line number) on malformed input.
FrameRecord frame_from_jsonl(std::string_view line);

/// `frames/<camera_id>/<ts with ':' replaced by '-'>.img`
std::string image_relpath(std::string_view camera_id, Timestamp ts);

/// Append-only frame store rooted at a directory: `frames.jsonl` plus images.
/// Records already in the log are never rewritten.
class FrameStore {
public:
    /// Creates the root if needed; throws IoError if it cannot be used.
    explicit FrameStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path log_path() const { return root_ / "frames.jsonl"; }

    bool has(std::string_view camera_id, Timestamp ts) const;

    /// Writes the image bytes for an ok frame. Existing images are kept.
    FramePayload store_image(std::string_view camera_id, Timestamp ts, std::string_view body);

    /// Appends to the log unless (camera_id, ts) is already present.
    /// Returns false when skipped.
    bool append(const FrameRecord& frame);

private:
    std::filesystem::path root_;
    std::set<std::pair<std::string, Timestamp>> seen_;
};

struct FetchResult {
    int http_status = 0; // 0 when no response arrived
    std::string body;
};

/// Single HTTP(S) GET. Never throws for network trouble.
FetchResult fetch_url(const std::string& url, std::chrono::seconds timeout);

/// Fetches one snapshot and turns the outcome into a FrameRecord stamped with
/// `tick`. Timeouts, non-200 answers and empty bodies become fetch_failed.
FrameRecord poll_once(const CameraRecord& camera, Timestamp tick, std::chrono::seconds timeout,
                      FrameStore& store);

struct PollerOptions {
    std::chrono::seconds interval{std::chrono::minutes{10}};
    Timestamp start;
    Timestamp end;
    unsigned parallelism = 16;
    std::chrono::seconds timeout{30};
    /// Wait for wall-clock tick times. When false ticks run back to back.
    bool realtime = true;
};

/// Tick schedule start, start+interval, ... <= end.
std::vector<Timestamp> tick_schedule(Timestamp start, Timestamp end,
                                     std::chrono::seconds interval);

/// Polls every camera at every tick, appending exactly one record per
/// (camera, tick) to the store. Ticks already present in the log are skipped.
/// Returns the number of records appended.
std::size_t run_poller(const std::vector<CameraRecord>& cameras, const PollerOptions& options,
                       FrameStore& store);

using FrameStreams = std::map<std::string, std::vector<FrameRecord>>;

/// Reads a frame log, groups by camera and sorts each stream by time.
/// Duplicate (camera_id, ts) and unparseable lines are errors naming the line.
FrameStreams replay_text(std::string_view text);
FrameStreams replay(const std::filesystem::path& frame_log);

} // namespace camxref::feed
