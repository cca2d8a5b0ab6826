#include "camxref/camera_feed.hpp"

#include "camxref/error.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace camxref::feed {

namespace {

struct SplitUrl {
    std::string origin; // scheme://host[:port]
    std::string target; // path + query
};

std::optional<SplitUrl> split_url(const std::string& url)
{
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        return std::nullopt;
    }
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        return std::nullopt;
    }
    const auto path_start = url.find('/', scheme_end + 3);
    SplitUrl out;
    out.origin = url.substr(0, path_start);
    out.target = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (out.origin.size() <= scheme_end + 3) {
        return std::nullopt;
    }
    return out;
}

} // namespace

FetchResult fetch_url(const std::string& url, std::chrono::seconds timeout)
{
    const auto parts = split_url(url);
    if (!parts) {
        return {};
    }
    try {
        httplib::Client client(parts->origin);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        client.set_follow_location(true);
        auto res = client.Get(parts->target);
        if (!res) {
            return {};
        }
        return {res->status, std::move(res->body)};
    } catch (const std::exception&) {
        return {};
    }
}

FrameRecord poll_once(const CameraRecord& camera, Timestamp tick, std::chrono::seconds timeout,
                      FrameStore& store)
{
    FrameRecord frame{camera.camera_id, tick, std::nullopt};
    auto res = fetch_url(camera.snapshot_url, timeout);
    if (res.http_status == 200 && !res.body.empty()) {
        frame.payload = store.store_image(camera.camera_id, tick, res.body);
    }
    return frame;
}

std::size_t run_poller(const std::vector<CameraRecord>& cameras, const PollerOptions& options,
                       FrameStore& store)
{
    const auto ticks = tick_schedule(options.start, options.end, options.interval);
    if (options.parallelism == 0) {
        throw ValidationError("parallelism must be at least 1");
    }
    for (const auto& cam : cameras) {
        std::error_code ec;
        std::filesystem::create_directories(store.root() / "frames" / cam.camera_id, ec);
        if (ec) {
            throw IoError("cannot create image directory for camera '" + cam.camera_id +
                          "': " + ec.message());
        }
    }

    std::size_t appended = 0;
    for (const Timestamp tick : ticks) {
        std::vector<const CameraRecord*> pending;
        for (const auto& cam : cameras) {
            if (!store.has(cam.camera_id, tick)) {
                pending.push_back(&cam);
            }
        }
        if (pending.empty()) {
            continue;
        }
        if (options.realtime) {
            std::this_thread::sleep_until(std::chrono::system_clock::time_point(tick));
        }

        std::vector<FrameRecord> results(pending.size());
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        {
            const auto workers = std::min<std::size_t>(options.parallelism, pending.size());
            std::vector<std::jthread> pool;
            pool.reserve(workers);
            for (std::size_t w = 0; w < workers; ++w) {
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < pending.size(); i = next++) {
                        try {
                            results[i] = poll_once(*pending[i], tick, options.timeout, store);
                        } catch (...) {
                            std::lock_guard lock(failure_mutex);
                            if (!failure) {
                                failure = std::current_exception();
                            }
                        }
                    }
                });
            }
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
        for (const auto& r : results) {
            appended += store.append(r) ? 1 : 0;
        }
    }
    return appended;
}

} // namespace camxref::feed
