#include "camxref/synth.hpp"

#include "camxref/error.hpp"
#include "camxref/io.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <thread>

namespace camxref::synth {

namespace {

std::string_view mode_name(FeedMode m)
{
    switch (m) {
    case FeedMode::ok:
        return "ok";
    case FeedMode::freeze:
        return "freeze";
    case FeedMode::gap:
        return "gap";
    }
    return {};
}

std::string url_path(const std::string& url)
{
    const auto scheme = url.find("://");
    const auto start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (start == std::string::npos) {
        return "/";
    }
    auto path = url.substr(start);
    if (const auto q = path.find('?'); q != std::string::npos) {
        path.resize(q);
    }
    return path;
}

} // namespace

FailureSchedule parse_schedule(std::string_view json_text)
{
    const auto j = nlohmann::json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("cameras") || !j["cameras"].is_object()) {
        throw ValidationError("schedule must be an object with a 'cameras' object");
    }
    FailureSchedule out;
    try {
        for (const auto& [id, ranges] : j["cameras"].items()) {
            auto& list = out[id];
            for (const auto& r : ranges) {
                ScheduleRange range;
                range.from_tick = r.at("from_tick").get<std::int64_t>();
                range.to_tick = r.at("to_tick").get<std::int64_t>();
                const auto mode = r.at("mode").get<std::string>();
                if (mode == "ok") {
                    range.mode = FeedMode::ok;
                } else if (mode == "freeze") {
                    range.mode = FeedMode::freeze;
                } else if (mode == "gap") {
                    range.mode = FeedMode::gap;
                } else {
                    throw ValidationError("camera '" + id + "': unknown mode '" + mode + "'");
                }
                if (range.from_tick < 0 || range.to_tick < range.from_tick) {
                    throw ValidationError("camera '" + id + "': bad tick range " +
                                          std::to_string(range.from_tick) + ".." +
                                          std::to_string(range.to_tick));
                }
                list.push_back(range);
            }
            std::sort(list.begin(), list.end(),
                      [](const auto& a, const auto& b) { return a.from_tick < b.from_tick; });
            for (std::size_t i = 1; i < list.size(); ++i) {
                if (list[i].from_tick <= list[i - 1].to_tick) {
                    throw ValidationError("camera '" + id + "': overlapping schedule ranges");
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed schedule: ") + e.what());
    }
    return out;
}

std::string format_schedule(const FailureSchedule& schedule)
{
    nlohmann::ordered_json cams = nlohmann::ordered_json::object();
    for (const auto& [id, ranges] : schedule) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& r : ranges) {
            nlohmann::ordered_json e;
            e["from_tick"] = r.from_tick;
            e["to_tick"] = r.to_tick;
            e["mode"] = mode_name(r.mode);
            arr.push_back(std::move(e));
        }
        cams[id] = std::move(arr);
    }
    nlohmann::ordered_json j;
    j["cameras"] = std::move(cams);
    return j.dump(2) + "\n";
}

SnapshotSimulator::SnapshotSimulator(std::vector<feed::CameraRecord> cameras,
                                     FailureSchedule schedule, std::chrono::seconds interval,
                                     Timestamp epoch)
    : cameras_(std::move(cameras)), schedule_(std::move(schedule)), interval_(interval),
      epoch_(epoch)
{
    if (interval_.count() <= 0) {
        throw ValidationError("simulator interval must be positive");
    }
    for (const auto& c : cameras_) {
        path_to_camera_.emplace(url_path(c.snapshot_url), c.camera_id);
    }
}

std::string SnapshotSimulator::fresh_body(std::string_view camera_id, std::int64_t tick)
{
    // A small fake JPEG: SOI marker, an identifying header, seeded filler.
    std::string body = "\xFF\xD8\xFF\xE0SIMFRAME ";
    body += camera_id;
    body += " tick ";
    body += std::to_string(tick);
    body.push_back('\n');
    const auto seed = io::sha256_hex(body);
    for (int i = 0; i < 4; ++i) {
        body += io::sha256_hex(seed + std::to_string(i));
    }
    body += "\xFF\xD9";
    return body;
}

SimResponse SnapshotSimulator::respond(std::string_view camera_id, std::int64_t tick) const
{
    if (tick < 0) {
        return {503, "feed not started"};
    }
    const auto it = schedule_.find(std::string(camera_id));
    if (it != schedule_.end()) {
        for (const auto& r : it->second) {
            if (tick < r.from_tick || tick > r.to_tick) {
                continue;
            }
            switch (r.mode) {
            case FeedMode::gap:
                return {503, "camera offline"};
            case FeedMode::freeze:
                return {200, fresh_body(camera_id, r.from_tick > 0 ? r.from_tick - 1 : 0)};
            case FeedMode::ok:
                break;
            }
        }
    }
    return {200, fresh_body(camera_id, tick)};
}

std::int64_t SnapshotSimulator::tick_at(std::chrono::system_clock::time_point now) const
{
    const auto elapsed = now - std::chrono::system_clock::time_point(epoch_);
    const auto n = std::chrono::floor<std::chrono::seconds>(elapsed).count();
    const auto step = interval_.count();
    return n >= 0 ? n / step : -((-n + step - 1) / step);
}

std::optional<std::string> SnapshotSimulator::camera_for_path(std::string_view path) const
{
    const auto it = path_to_camera_.find(path);
    if (it == path_to_camera_.end()) {
        return std::nullopt;
    }
    return it->second;
}

struct SimulatorServer::Impl {
    explicit Impl(SnapshotSimulator s) : sim(std::move(s))
    {
        server.Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
            const auto camera = sim.camera_for_path(req.path);
            if (!camera) {
                res.status = 404;
                res.set_content("unknown camera", "text/plain");
                return;
            }
            const auto answer = sim.respond(*camera, sim.tick_at(std::chrono::system_clock::now()));
            res.status = answer.status;
            res.set_content(answer.body, answer.status == 200 ? "image/jpeg" : "text/plain");
        });
    }

    SnapshotSimulator sim;
    httplib::Server server;
    std::thread worker;
};

SimulatorServer::SimulatorServer(SnapshotSimulator sim) : impl_(std::make_unique<Impl>(std::move(sim)))
{
}

SimulatorServer::~SimulatorServer() { stop(); }

int SimulatorServer::start(const std::string& host, int port)
{
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) {
        throw IoError("simulator cannot bind " + host + ":" + std::to_string(port));
    }
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void SimulatorServer::run(const std::string& host, int port)
{
    if (!impl_->server.listen(host, port)) {
        throw IoError("simulator cannot listen on " + host + ":" + std::to_string(port));
    }
}

void SimulatorServer::stop()
{
    if (!impl_) {
        return;
    }
    impl_->server.stop();
    if (impl_->worker.joinable()) {
        impl_->worker.join();
    }
}

} // namespace camxref::synth
