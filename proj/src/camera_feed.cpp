#include "camxref/camera_feed.hpp"

#include "camxref/csv.hpp"
#include "camxref/error.hpp"
#include "camxref/io.hpp"
#include "camxref/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>

namespace camxref::feed {

namespace {

std::string at_line(std::size_t line, const std::string& msg)
{
    return "line " + std::to_string(line) + ": " + msg;
}

bool safe_id(std::string_view id)
{
    if (id.empty() || id == "." || id == "..") {
        return false;
    }
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '-' || c == '_' || c == '.';
    });
}

} // namespace

std::vector<CameraRecord> parse_registry(std::string_view text,
                                         const std::optional<geo::BoundingBox>& study_area)
{
    if (text.substr(0, 3) == "\xEF\xBB\xBF") {
        text.remove_prefix(3);
    }
    const auto rows = csv::parse(text);
    if (rows.empty()) {
        throw ValidationError("registry is empty; expected header '" +
                              std::string(kRegistryHeader) + "'");
    }
    const auto expected = text::split(kRegistryHeader, ',');
    std::vector<std::string> header;
    for (const auto& f : rows.front().fields) {
        header.emplace_back(text::trim(f));
    }
    if (header != expected) {
        throw ValidationError(at_line(rows.front().line_number, "registry header must be '" +
                                                                    std::string(kRegistryHeader) +
                                                                    "'"));
    }

    std::vector<CameraRecord> cameras;
    std::set<std::string> ids;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const auto line = row.line_number;
        if (row.fields.size() != expected.size()) {
            throw ValidationError(at_line(line, "expected " + std::to_string(expected.size()) +
                                                    " fields, got " +
                                                    std::to_string(row.fields.size())));
        }
        CameraRecord cam;
        cam.camera_id = std::string(text::trim(row.fields[0]));
        cam.name = row.fields[1];
        cam.city = std::string(text::trim(row.fields[2]));
        if (!safe_id(cam.camera_id)) {
            throw ValidationError(at_line(line, "camera_id '" + cam.camera_id +
                                                    "' must be non-empty and use only "
                                                    "[A-Za-z0-9._-]"));
        }
        if (cam.city.empty()) {
            throw ValidationError(at_line(line, "city is empty"));
        }
        const auto lat = text::parse_double(row.fields[3]);
        const auto lon = text::parse_double(row.fields[4]);
        if (!lat || !lon || !geo::is_valid(geo::GeoPoint{*lat, *lon})) {
            throw ValidationError(at_line(line, "invalid lat/lon"));
        }
        cam.location = {*lat, *lon};
        if (study_area && !geo::contains(*study_area, cam.location)) {
            throw ValidationError(at_line(line, "camera '" + cam.camera_id +
                                                    "' lies outside the study area"));
        }
        cam.snapshot_url = std::string(text::trim(row.fields[5]));
        const std::string_view url = cam.snapshot_url;
        const auto scheme_end = url.find("://");
        const auto scheme = url.substr(0, scheme_end);
        if (scheme_end == std::string_view::npos || (scheme != "http" && scheme != "https") ||
            url.size() == scheme_end + 3 || url[scheme_end + 3] == '/') {
            throw ValidationError(at_line(line, "snapshot_url must be an http(s) URL with a host"));
        }
        const auto w_text = text::trim(row.fields[6]);
        const auto h_text = text::trim(row.fields[7]);
        if (!w_text.empty() || !h_text.empty()) {
            const auto w = text::parse_int(w_text);
            const auto h = text::parse_int(h_text);
            if (!w || !h || *w <= 0 || *h <= 0) {
                throw ValidationError(at_line(line, "width/height must both be positive "
                                                    "integers or both empty"));
            }
            cam.resolution = Resolution{static_cast<int>(*w), static_cast<int>(*h)};
        }
        if (!ids.insert(cam.camera_id).second) {
            throw ValidationError(at_line(line, "duplicate camera_id '" + cam.camera_id + "'"));
        }
        cameras.push_back(std::move(cam));
    }
    return cameras;
}

std::vector<CameraRecord> load_registry(const std::filesystem::path& path,
                                        const std::optional<geo::BoundingBox>& study_area)
{
    return parse_registry(io::read_file(path), study_area);
}

std::string format_registry(const std::vector<CameraRecord>& cameras)
{
    std::string out(kRegistryHeader);
    out.push_back('\n');
    for (const auto& c : cameras) {
        out += csv::join({c.camera_id, c.name, c.city, text::format_double(c.location.lat_deg),
                          text::format_double(c.location.lon_deg), c.snapshot_url,
                          c.resolution ? std::to_string(c.resolution->width) : "",
                          c.resolution ? std::to_string(c.resolution->height) : ""});
        out.push_back('\n');
    }
    return out;
}

std::string to_jsonl(const FrameRecord& frame)
{
    nlohmann::ordered_json j;
    j["camera_id"] = frame.camera_id;
    j["ts_utc"] = format_rfc3339(frame.ts_utc);
    if (frame.payload) {
        j["status"] = "ok";
        j["digest"] = frame.payload->digest;
        j["bytes"] = frame.payload->byte_size;
        j["path"] = frame.payload->image_path;
    } else {
        j["status"] = "fetch_failed";
        j["digest"] = nullptr;
        j["bytes"] = nullptr;
        j["path"] = nullptr;
    }
    return j.dump();
}

FrameRecord frame_from_jsonl(std::string_view line)
{
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ValidationError("not a JSON object");
    }
    auto str = [&](const char* key) -> std::string {
        if (!j.contains(key) || !j[key].is_string()) {
            throw ValidationError(std::string("missing or non-string '") + key + "'");
        }
        return j[key].get<std::string>();
    };
    FrameRecord f;
    f.camera_id = str("camera_id");
    f.ts_utc = parse_rfc3339_or_throw(str("ts_utc"), "ts_utc");
    const std::string status = str("status");
    if (status == "ok") {
        FramePayload p;
        p.digest = str("digest");
        p.image_path = str("path");
        if (!j.contains("bytes") || !j["bytes"].is_number_unsigned()) {
            throw ValidationError("ok frame needs a non-negative integer 'bytes'");
        }
        p.byte_size = j["bytes"].get<std::uint64_t>();
        f.payload = std::move(p);
    } else if (status == "fetch_failed") {
        for (const char* key : {"digest", "bytes", "path"}) {
            if (j.contains(key) && !j[key].is_null()) {
                throw ValidationError(std::string("fetch_failed frame must have null '") + key +
                                      "'");
            }
        }
    } else {
        throw ValidationError("unknown status '" + status + "'");
    }
    return f;
}

std::string image_relpath(std::string_view camera_id, Timestamp ts)
{
    std::string stamp = format_rfc3339(ts);
    std::replace(stamp.begin(), stamp.end(), ':', '-');
    return "frames/" + std::string(camera_id) + "/" + stamp + ".img";
}

FrameStore::FrameStore(std::filesystem::path root) : root_(std::move(root))
{
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec || !std::filesystem::is_directory(root_)) {
        throw IoError("frame store root '" + root_.string() + "' is not usable" +
                      (ec ? ": " + ec.message() : std::string()));
    }
    if (std::filesystem::exists(log_path())) {
        for (const auto& [id, frames] : replay(log_path())) {
            for (const auto& f : frames) {
                seen_.emplace(id, f.ts_utc);
            }
        }
    } else {
        std::ofstream touch(log_path(), std::ios::app);
        if (!touch) {
            throw IoError("cannot create frame log '" + log_path().string() + "'");
        }
    }
}

bool FrameStore::has(std::string_view camera_id, Timestamp ts) const
{
    return seen_.count({std::string(camera_id), ts}) != 0;
}

FramePayload FrameStore::store_image(std::string_view camera_id, Timestamp ts,
                                     std::string_view body)
{
    FramePayload p{io::sha256_hex(body), body.size(), image_relpath(camera_id, ts)};
    const auto full = root_ / p.image_path;
    if (!std::filesystem::exists(full)) {
        io::write_file(full, body);
    }
    return p;
}

bool FrameStore::append(const FrameRecord& frame)
{
    if (!seen_.emplace(frame.camera_id, frame.ts_utc).second) {
        return false;
    }
    std::ofstream out(log_path(), std::ios::app | std::ios::binary);
    out << to_jsonl(frame) << '\n';
    if (!out) {
        throw IoError("cannot append to frame log '" + log_path().string() + "'");
    }
    return true;
}

std::vector<Timestamp> tick_schedule(Timestamp start, Timestamp end, std::chrono::seconds interval)
{
    if (interval.count() <= 0) {
        throw ValidationError("poll interval must be positive");
    }
    if (!(start < end)) {
        throw ValidationError("poll window start must precede end");
    }
    std::vector<Timestamp> ticks;
    for (Timestamp t = start; t <= end; t += interval) {
        ticks.push_back(t);
    }
    return ticks;
}

FrameStreams replay_text(std::string_view text)
{
    FrameStreams streams;
    std::map<std::pair<std::string, Timestamp>, std::size_t> first_line;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            nl = text.size();
        }
        const auto line = text::trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty()) {
            continue;
        }
        FrameRecord f;
        try {
            f = frame_from_jsonl(line);
        } catch (const ValidationError& e) {
            throw ValidationError(at_line(line_no, e.what()));
        }
        const auto [it, inserted] = first_line.emplace(std::pair{f.camera_id, f.ts_utc}, line_no);
        if (!inserted) {
            throw ValidationError(at_line(line_no, "duplicate frame for camera '" + f.camera_id +
                                                       "' at " + format_rfc3339(f.ts_utc) +
                                                       " (first on line " +
                                                       std::to_string(it->second) + ")"));
        }
        streams[f.camera_id].push_back(std::move(f));
    }
    for (auto& [id, frames] : streams) {
        std::stable_sort(frames.begin(), frames.end(),
                         [](const auto& a, const auto& b) { return a.ts_utc < b.ts_utc; });
    }
    return streams;
}

FrameStreams replay(const std::filesystem::path& frame_log)
{
    return replay_text(io::read_file(frame_log));
}

} // namespace camxref::feed
