#include "support.hpp"

#include "camxref/cli.hpp"
#include "camxref/geo.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

namespace camxref::testing {

TempDir::TempDir()
{
    std::string tmpl = (std::filesystem::temp_directory_path() / "camxref-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) {
        throw std::runtime_error("mkdtemp failed");
    }
    path_ = tmpl;
}

TempDir::~TempDir()
{
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::filesystem::path source_dir() { return CAMXREF_SOURCE_DIR; }

CliResult run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "camxref");
    std::ostringstream out;
    std::ostringstream err;
    CliResult r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi)
{
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

double uniform_real(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<std::string> brute_force_join(const disruption::CameraGroup& group, double scale_miles,
                                          const std::vector<social::SocialPost>& posts)
{
    const auto box = geo::bounding_box(group.center, geo::CatchmentScale(scale_miles));
    std::vector<std::string> ids;
    for (const auto& p : posts) {
        const bool in_space = p.point.lat_deg >= box.min_lat && p.point.lat_deg <= box.max_lat &&
                              p.point.lon_deg >= box.min_lon && p.point.lon_deg <= box.max_lon;
        const bool in_time = p.ts_utc >= group.start_ts && p.ts_utc <= group.end_ts;
        if (in_space && in_time) {
            ids.push_back(p.post_id);
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<disruption::CameraGroup> random_groups(Rng& rng, std::size_t count)
{
    std::vector<disruption::CameraGroup> groups;
    const auto base = make_utc(2017, 9, 6);
    for (std::size_t i = 0; i < count; ++i) {
        disruption::CameraGroup g;
        g.group_id = "g-" + std::to_string(i + 1);
        g.city = "City" + std::to_string(i % 3);
        // Clustered centres so catchments overlap often.
        g.center = {uniform_real(rng, 25.0, 26.0), uniform_real(rng, -82.0, -81.0)};
        g.start_ts = base + std::chrono::seconds{uniform(rng, 0, 5 * 86400)};
        g.end_ts = g.start_ts + std::chrono::seconds{uniform(rng, 0, 3 * 86400)};
        g.camera_ids = {g.group_id + "-cam"};
        groups.push_back(g);
    }
    return groups;
}

std::vector<social::SocialPost> random_posts(Rng& rng, const std::vector<disruption::CameraGroup>& groups,
                                             const std::vector<double>& scales, std::size_t count)
{
    std::vector<social::SocialPost> posts;
    posts.reserve(count);
    const auto base = make_utc(2017, 9, 5);
    for (std::size_t i = 0; i < count; ++i) {
        social::SocialPost p;
        p.post_id = "p" + std::to_string(i);
        p.platform = uniform(rng, 0, 1) ? social::Platform::instagram : social::Platform::twitter;
        p.has_image = uniform(rng, 0, 1) == 1;
        p.text = uniform(rng, 0, 2) == 0 ? "Irma" : "storm";
        const auto mode = uniform(rng, 0, 9);
        if (mode < 3 || groups.empty()) {
            p.point = {uniform_real(rng, 24.5, 26.5), uniform_real(rng, -82.5, -80.5)};
            p.ts_utc = base + std::chrono::seconds{uniform(rng, 0, 10 * 86400)};
        } else {
            const auto& g = groups[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(groups.size()) - 1))];
            const auto scale = scales[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(scales.size()) - 1))];
            const auto box = geo::bounding_box(g.center, geo::CatchmentScale(scale));
            const double pad = 0.02;
            p.point = {uniform_real(rng, box.min_lat - pad, box.max_lat + pad),
                       uniform_real(rng, box.min_lon - pad, box.max_lon + pad)};
            if (mode == 3) {
                p.point.lat_deg = uniform(rng, 0, 1) ? box.min_lat : box.max_lat;
            } else if (mode == 4) {
                p.point.lon_deg = uniform(rng, 0, 1) ? box.min_lon : box.max_lon;
            }
            const auto span = (g.end_ts - g.start_ts).count();
            p.ts_utc = g.start_ts + std::chrono::seconds{uniform(rng, -600, span + 600)};
            if (mode == 5) {
                p.ts_utc = uniform(rng, 0, 1) ? g.start_ts : g.end_ts;
            } else if (mode == 6) {
                p.ts_utc = uniform(rng, 0, 1) ? g.start_ts - std::chrono::seconds{1}
                                              : g.end_ts + std::chrono::seconds{1};
            }
        }
        posts.push_back(std::move(p));
    }
    return posts;
}

synth::FixtureSpec random_feasible_spec(Rng& rng)
{
    synth::FixtureSpec spec;
    spec.seed = rng();
    spec.scales_miles = {2.0, 10.0, 20.0};
    spec.background_posts = uniform(rng, 0, 40);
    spec.outside_posts = uniform(rng, 0, 6);
    spec.placement = synth::Placement::exclusive;
    // Distinct cells of a half-degree grid keep 20-mile boxes apart.
    std::set<std::pair<int, int>> used;
    const auto n_groups = uniform(rng, 1, 6);
    for (std::int64_t i = 0; i < n_groups; ++i) {
        std::pair<int, int> cell;
        do {
            cell = {static_cast<int>(uniform(rng, 0, 10)), static_cast<int>(uniform(rng, 0, 14))};
        } while (!used.insert(cell).second);
        synth::GroupTarget g;
        g.city = "Town " + std::to_string(uniform(rng, 1, 3));
        g.center = {24.5 + 0.5 * cell.first, -86.5 + 0.5 * cell.second};
        g.cameras_in_group = static_cast<int>(uniform(rng, 1, 5));
        g.start_ts = make_utc(2017, 8, 21) + std::chrono::seconds{uniform(rng, 0, 20 * 86400)};
        g.end_ts = g.start_ts + std::chrono::seconds{uniform(rng, 0, 2 * 86400)};
        crossref::FunnelCounts cum;
        for (std::size_t s = 0; s < spec.scales_miles.size(); ++s) {
            crossref::FunnelCounts ring;
            ring.relevant = uniform(rng, 0, 4);
            ring.keyword_instagram = ring.relevant + uniform(rng, 0, 4);
            ring.keyword = ring.keyword_instagram + uniform(rng, 0, 4);
            ring.total = ring.keyword + uniform(rng, 0, 6);
            cum += ring;
            g.funnel_by_scale.push_back(cum);
        }
        spec.groups.push_back(g);
    }
    std::int64_t group_keyword = 0;
    for (const auto& g : spec.groups) {
        group_keyword += g.funnel_by_scale.back().keyword;
    }
    spec.keyword_post_target = uniform(rng, 0, 1) ? 0 : group_keyword + uniform(rng, 0, 30);
    return spec;
}

crossref::ReportTable pipeline_table(const synth::FixtureSpec& spec, const synth::Fixture& fixture)
{
    const social::KeywordFilter filter({spec.term});
    const auto labels = crossref::to_labels(fixture.labels);
    std::vector<social::SocialPost> admitted;
    for (const auto& p : fixture.posts) {
        if (spec.study.admits(p.point, p.ts_utc)) {
            admitted.push_back(p);
        }
    }
    return crossref::aggregate(fixture.groups, spec.scales_miles, admitted, filter, labels).table;
}

} // namespace camxref::testing
