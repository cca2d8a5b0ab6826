#include "camxref/cli.hpp"

#include "camxref/camera_feed.hpp"
#include "camxref/crossref.hpp"
#include "camxref/error.hpp"
#include "camxref/io.hpp"
#include "camxref/report.hpp"
#include "camxref/synth.hpp"
#include "camxref/text.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <ostream>

namespace camxref::cli {

void Config::validate() const
{
    crossref::validate_scales(scales_miles);
    social::KeywordFilter{terms};
    study.validate();
    disruption.validate();
}

std::filesystem::path default_out_dir()
{
    if (const char* env = std::getenv("CAMXREF_OUT"); env != nullptr && *env != '\0') {
        return env;
    }
    return "out";
}

namespace {

std::vector<double> parse_scales(const std::string& s)
{
    std::vector<double> out;
    for (const auto& part : text::split(s, ',')) {
        const auto v = text::parse_double(part);
        if (!v) {
            throw ValidationError("--scales: '" + part + "' is not a number");
        }
        out.push_back(*v);
    }
    crossref::validate_scales(out);
    return out;
}

geo::BoundingBox parse_area(const std::string& s)
{
    const auto parts = text::split(s, ',');
    std::vector<double> v;
    for (const auto& p : parts) {
        const auto d = text::parse_double(p);
        if (!d) {
            throw ValidationError("--study-area expects min_lat,max_lat,min_lon,max_lon");
        }
        v.push_back(*d);
    }
    if (v.size() != 4) {
        throw ValidationError("--study-area expects min_lat,max_lat,min_lon,max_lon");
    }
    const geo::BoundingBox box{v[0], v[1], v[2], v[3]};
    if (!geo::is_valid(box)) {
        throw ValidationError("--study-area is not a valid box");
    }
    return box;
}

disruption::EventWindow parse_window(const std::string& s)
{
    const auto parts = text::split(s, ',');
    if (parts.size() != 2) {
        throw ValidationError("--event-window expects START,END in RFC 3339");
    }
    disruption::EventWindow w{parse_rfc3339_or_throw(parts[0], "event window start"),
                              parse_rfc3339_or_throw(parts[1], "event window end")};
    if (w.end < w.start) {
        throw ValidationError("--event-window end precedes start");
    }
    return w;
}

// Flat JSON object keyed by long option name, read through CLI11's config
// hook so command-line flags still win and required options can come from it.
class JsonConfig : public CLI::Config {
public:
    /// Keys apply to this subcommand.
    explicit JsonConfig(std::string subcommand) : subcommand_(std::move(subcommand)) {}

    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override
    {
        nlohmann::ordered_json j = nlohmann::ordered_json::object();
        for (const CLI::Option* opt : app->get_options()) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) {
                continue;
            }
            const auto& name = opt->get_lnames().front();
            if (opt->count() > 0) {
                const auto& r = opt->results();
                j[name] = r.size() == 1 ? nlohmann::ordered_json(r.front()) : nlohmann::ordered_json(r);
            } else if (default_also && !opt->get_default_str().empty()) {
                j[name] = opt->get_default_str();
            }
        }
        return j.dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override
    {
        const auto j = nlohmann::json::parse(input, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw ValidationError("config file must hold a flat JSON object");
        }
        auto as_text = [](const nlohmann::json& v) {
            return v.is_string() ? v.get<std::string>() : v.dump();
        };
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : j.items()) {
            CLI::ConfigItem item;
            if (!subcommand_.empty()) {
                item.parents = {subcommand_};
            }
            item.name = key;
            if (value.is_array()) {
                for (const auto& v : value) {
                    item.inputs.push_back(as_text(v));
                }
            } else if (value.is_object()) {
                throw ValidationError("config key '" + key + "' must not be an object");
            } else {
                item.inputs.push_back(as_text(value));
            }
            items.push_back(std::move(item));
        }
        return items;
    }

private:
    std::string subcommand_;
};

struct StudyFlags {
    std::string area;
    std::string start;
    std::string end;

    void add(CLI::App& sub)
    {
        sub.add_option("--study-area", area, "min_lat,max_lat,min_lon,max_lon (default 24,30,-87,-79)");
        sub.add_option("--study-start", start, "RFC 3339 (default 2017-08-20T00:00:00Z)");
        sub.add_option("--study-end", end, "RFC 3339 (default 2017-09-13T23:59:59Z)");
    }

    social::StudyWindow resolve() const
    {
        auto w = social::default_study_window();
        if (!area.empty()) {
            w.area = parse_area(area);
        }
        if (!start.empty()) {
            w.start_ts = parse_rfc3339_or_throw(start, "--study-start");
        }
        if (!end.empty()) {
            w.end_ts = parse_rfc3339_or_throw(end, "--study-end");
        }
        w.validate();
        return w;
    }
};

void write_stage_table(const crossref::ReportTable& table, const std::filesystem::path& dir)
{
    io::write_file(dir / "table.json", crossref::table_to_json(table));
    io::write_file(dir / "report.csv", report::render(table, report::Format::csv));
}

void write_report(const crossref::ReportTable& table, const std::filesystem::path& dir,
                  std::ostream& out)
{
    io::write_file(dir / "report.csv", report::render(table, report::Format::csv));
    io::write_file(dir / "report.md", report::render(table, report::Format::markdown));
    io::write_file(dir / "stats.json", report::stats_json(table));
    for (const auto& p : report::relevance_percentages(table)) {
        out << "relevant share at " << text::format_double(p.scale_miles)
            << " mi: " << report::format_percent(p.tenths, 1)
            << (p.tenths ? "%" : "") << " (" << p.relevant << "/" << p.total << ")\n";
    }
}

struct CrossrefRun {
    bool strict = false;
    bool dedup = false;
    std::string emit_matches;
};

crossref::ReportTable run_crossref(const Config& cfg, const CrossrefRun& opts, std::ostream& err)
{
    const auto groups = disruption::parse_groups_json(io::read_file(cfg.groups));
    const auto parsed = social::parse_posts(cfg.posts, cfg.study, opts.strict);
    err << parsed.report.summary();

    crossref::Labels labels;
    if (!cfg.labels.empty()) {
        const auto records = crossref::parse_labels_csv(io::read_file(cfg.labels));
        const auto unknown = crossref::unknown_label_ids(records, parsed.posts);
        for (std::size_t i = 0; i < unknown.size() && i < 10; ++i) {
            err << "warning: label for unknown post '" << unknown[i] << "' ignored\n";
        }
        if (unknown.size() > 10) {
            err << "warning: " << unknown.size() - 10 << " more unknown label ids ignored\n";
        }
        labels = crossref::to_labels(records);
    }

    const social::KeywordFilter filter(cfg.terms);
    auto result = crossref::aggregate(groups, cfg.scales_miles, parsed.posts, filter, labels,
                                      {opts.dedup, !opts.emit_matches.empty()});
    if (!opts.emit_matches.empty()) {
        io::write_file(opts.emit_matches, crossref::format_matches_jsonl(result.matches));
    }
    return std::move(result.table);
}

std::string column_label(report::Column c)
{
    switch (c) {
    case report::Column::total:
        return "posts";
    case report::Column::keyword:
        return "keyword";
    case report::Column::keyword_instagram:
        return "instagram";
    case report::Column::relevant:
        return "relevant";
    }
    return {};
}

// Cell-by-cell comparison of a generated table against fixture targets.
std::vector<std::string> diff_table(const synth::FixtureSpec& spec,
                                    const crossref::ReportTable& table)
{
    static constexpr report::Column kCols[] = {report::Column::total, report::Column::keyword,
                                               report::Column::keyword_instagram,
                                               report::Column::relevant};
    std::vector<std::string> diffs;
    if (table.rows.size() != spec.groups.size()) {
        diffs.push_back("row count: expected " + std::to_string(spec.groups.size()) + ", got " +
                        std::to_string(table.rows.size()));
        return diffs;
    }
    std::vector<crossref::FunnelCounts> want_totals(spec.scales_miles.size());
    std::int64_t want_cameras = 0;
    for (std::size_t i = 0; i < spec.groups.size(); ++i) {
        const auto& g = spec.groups[i];
        const auto& row = table.rows[i];
        const auto who = g.city + " (row " + std::to_string(i + 1) + ")";
        want_cameras += g.cameras_in_group;
        if (row.cameras_in_group != g.cameras_in_group) {
            diffs.push_back(who + " cameras: expected " + std::to_string(g.cameras_in_group) +
                            ", got " + std::to_string(row.cameras_in_group));
        }
        for (std::size_t s = 0; s < spec.scales_miles.size(); ++s) {
            want_totals[s] += g.funnel_by_scale[s];
            for (const auto c : kCols) {
                const auto want = report::pick(g.funnel_by_scale[s], c);
                const auto got = report::pick(row.funnel_by_scale[s], c);
                if (want != got) {
                    diffs.push_back(who + " " + column_label(c) + " @ " +
                                    text::format_double(spec.scales_miles[s]) +
                                    " mi: expected " + std::to_string(want) + ", got " +
                                    std::to_string(got));
                }
            }
        }
    }
    if (table.total_cameras != want_cameras) {
        diffs.push_back("Total cameras: expected " + std::to_string(want_cameras) + ", got " +
                        std::to_string(table.total_cameras));
    }
    for (std::size_t s = 0; s < spec.scales_miles.size(); ++s) {
        for (const auto c : kCols) {
            const auto want = report::pick(want_totals[s], c);
            const auto got = report::pick(table.totals[s], c);
            if (want != got) {
                diffs.push_back("Total " + column_label(c) + " @ " +
                                text::format_double(spec.scales_miles[s]) + " mi: expected " +
                                std::to_string(want) + ", got " + std::to_string(got));
            }
        }
    }
    return diffs;
}

int reproduce(const std::filesystem::path& spec_path, const std::filesystem::path& out_dir,
              std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err)
{
    auto spec = synth::load_fixture_spec(spec_path);
    if (seed) {
        spec.seed = *seed;
    }
    const auto fixture = synth::generate_fixture(spec, synth::RepairPolicy::clamp);
    for (const auto& r : fixture.repairs) {
        err << "repair: " << r << "\n";
    }
    const auto fixture_dir = out_dir / "fixture";
    synth::write_fixture(fixture, fixture_dir);

    Config cfg;
    cfg.groups = fixture_dir / "groups.json";
    cfg.posts = fixture_dir / "posts.jsonl";
    cfg.labels = fixture_dir / "labels.csv";
    cfg.study = spec.study;
    cfg.scales_miles = spec.scales_miles;
    cfg.terms = {spec.term};
    cfg.validate();

    const auto table = run_crossref(cfg, {}, err);
    write_stage_table(table, out_dir);
    write_report(table, out_dir, out);

    auto diffs = diff_table(spec, table);
    if (spec.keyword_post_target > 0) {
        const auto parsed = social::parse_posts(cfg.posts, cfg.study, false);
        const auto matching = static_cast<std::int64_t>(
            social::filter_posts(parsed.posts, social::KeywordFilter(cfg.terms)).size());
        out << "keyword posts in study window: " << matching << "\n";
        if (matching != spec.keyword_post_target) {
            diffs.push_back("study-wide keyword posts: expected " +
                            std::to_string(spec.keyword_post_target) + ", got " +
                            std::to_string(matching));
        }
    }
    if (diffs.empty()) {
        out << "PASS: every cell matches " << spec_path.string() << "\n";
        return 0;
    }
    for (const auto& d : diffs) {
        out << "  mismatch: " << d << "\n";
    }
    out << "FAIL: " << diffs.size() << " cell(s) differ from " << spec_path.string() << "\n";
    return 1;
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Cross-reference camera feed disruptions with geo-tagged social posts", "camxref"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");
    app.option_defaults()->always_capture_default();

    Config cfg;
    cfg.out_dir = default_out_dir();
    std::string out_dir = cfg.out_dir.string();
    std::string scales = "2,10,20";
    std::vector<std::string> terms;
    StudyFlags study;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", out_dir, "Output directory (default $CAMXREF_OUT or ./out)");
    };

    // poll
    auto* poll = app.add_subcommand("poll", "Poll camera snapshots on a fixed tick schedule");
    std::string registry, start, end;
    double interval_minutes = 10.0;
    long interval_secs = 0;
    unsigned parallelism = 16;
    long timeout = 30;
    bool no_wait = false;
    add_common(poll);
    poll->add_option("--registry", registry, "Camera registry CSV")->required();
    poll->add_option("--start", start, "First tick (RFC 3339)")->required();
    poll->add_option("--end", end, "Last possible tick (RFC 3339)")->required();
    poll->add_option("--interval-minutes", interval_minutes, "Tick spacing in minutes");
    poll->add_option("--interval-secs", interval_secs, "Tick spacing in seconds (overrides minutes)");
    poll->add_option("--parallelism", parallelism, "Concurrent fetches per tick");
    poll->add_option("--timeout", timeout, "Per-fetch timeout in seconds");
    poll->add_flag("--no-wait", no_wait, "Do not wait for wall-clock tick times");

    // replay
    auto* replay = app.add_subcommand("replay", "Validate and time-order a frame log");
    std::string frames, replay_out;
    add_common(replay);
    replay->add_option("--frames", frames, "Frame log JSONL")->required();
    replay->add_option("--sorted", replay_out, "Write the time-ordered log here");

    // detect
    auto* detect = app.add_subcommand("detect", "Detect gap and frozen intervals in a frame log");
    std::string detect_out;
    add_common(detect);
    detect->add_option("--frames", frames, "Frame log JSONL")->required();
    detect->add_option("--min-frozen-run", cfg.disruption.min_frozen_run,
                       "Identical consecutive frames that count as frozen");
    detect->add_option("--min-gap-run", cfg.disruption.min_gap_run,
                       "Consecutive failed fetches that count as a gap");
    detect->add_option("--disruptions", detect_out, "Output file (default <out>/disruptions.json)");

    // group
    auto* group = app.add_subcommand("group", "Group co-located cameras sharing a disruption window");
    std::string disruptions, event_window, group_out;
    add_common(group);
    group->add_option("--registry", registry, "Camera registry CSV")->required();
    group->add_option("--disruptions", disruptions, "Disruptions JSON")->required();
    group->add_option("--event-window", event_window,
                      "START,END: pick each camera's longest interval overlapping this window");
    group->add_option("--groups", group_out, "Output file (default <out>/groups.json)");

    // ingest-posts
    auto* ingest = app.add_subcommand("ingest-posts", "Validate, window and keyword-count posts");
    std::string posts, accepted_out, rejections_out;
    bool strict = false;
    add_common(ingest);
    study.add(*ingest);
    ingest->add_option("--posts", posts, "Posts JSONL")->required();
    ingest->add_option("--term", terms, "Keyword term (repeatable)")->default_str("Irma");
    ingest->add_flag("--strict", strict, "Fail on the first malformed line");
    ingest->add_option("--accepted", accepted_out, "Write accepted posts JSONL here");
    ingest->add_option("--rejections", rejections_out, "Write the rejection report JSON here");

    // crossref
    auto* xref = app.add_subcommand("crossref", "Count posts in each group's catchments and window");
    std::string groups, labels, emit_matches;
    bool dedup = false;
    add_common(xref);
    study.add(*xref);
    xref->add_option("--groups", groups, "Camera groups JSON")->required();
    xref->add_option("--posts", posts, "Posts JSONL")->required();
    xref->add_option("--labels", labels, "Relevance labels CSV");
    xref->add_option("--term", terms, "Keyword term (repeatable)")->default_str("Irma");
    xref->add_option("--scales", scales, "Catchment side lengths in miles");
    xref->add_flag("--dedup", dedup, "Also report distinct-post totals");
    xref->add_flag("--strict", strict, "Fail on the first malformed post line");
    xref->add_option("--emit-matches", emit_matches, "Write per-group matches JSONL here");

    // report
    auto* rep = app.add_subcommand("report", "Render report.csv, report.md and stats.json");
    std::string table_path;
    add_common(rep);
    rep->add_option("--table", table_path, "table.json written by crossref")->required();

    // synth
    auto* syn = app.add_subcommand("synth", "Generate a fixture from a count specification");
    std::string spec_path;
    std::optional<std::uint64_t> seed;
    bool allow_repair = false;
    add_common(syn);
    syn->add_option("--spec", spec_path, "Fixture spec JSON")->required();
    syn->add_option("--seed", seed, "Random seed (default: the spec's, else 42)");
    syn->add_flag("--allow-repair", allow_repair,
                  "Clamp inconsistent targets instead of failing");

    // serve
    auto* serve = app.add_subcommand("serve", "Serve simulated camera snapshots over HTTP");
    std::string schedule, epoch, host = "127.0.0.1";
    int port = 8080;
    long serve_interval = 600;
    add_common(serve);
    serve->add_option("--registry", registry, "Camera registry CSV")->required();
    serve->add_option("--schedule", schedule, "Failure schedule JSON");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "TCP port (0 picks one)");
    serve->add_option("--interval-secs", serve_interval, "Seconds per tick");
    serve->add_option("--epoch", epoch, "Time of tick 0 (RFC 3339, default now)");

    // reproduce
    auto* repro = app.add_subcommand("reproduce", "Generate, cross-reference and diff a fixture spec");
    add_common(repro);
    repro->add_option("spec", spec_path, "Fixture spec JSON")->required();
    repro->add_option("--seed", seed, "Random seed override");

    // --config is a top-level option that may follow the subcommand; its flat
    // keys are routed to whichever subcommand was named.
    std::string sub_name;
    for (std::size_t i = 1; i < args.size() && sub_name.empty(); ++i) {
        for (const auto* s : app.get_subcommands({})) {
            if (s->get_name() == args[i]) {
                sub_name = args[i];
            }
        }
    }
    app.set_config("--config", "", "JSON file of flag defaults, keyed by long option name (flags win)");
    app.config_formatter(std::make_shared<JsonConfig>(sub_name));

    // The config option belongs to the top-level app; hoist it ahead of the
    // subcommand so its values are in place before requirements are checked.
    std::vector<std::string> ordered{args.begin(), args.end()};
    for (std::size_t i = 1; i < ordered.size(); ++i) {
        if (ordered[i].rfind("--config=", 0) == 0) {
            std::rotate(ordered.begin() + 1, ordered.begin() + static_cast<std::ptrdiff_t>(i),
                        ordered.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        } else if (ordered[i] == "--config" && i + 1 < ordered.size()) {
            std::rotate(ordered.begin() + 1, ordered.begin() + static_cast<std::ptrdiff_t>(i),
                        ordered.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            ++i;
        }
    }
    std::vector<const char*> argv;
    for (const auto& a : ordered) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::FileError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return 1;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        cfg.out_dir = out_dir;
        cfg.scales_miles = parse_scales(scales);
        if (!terms.empty()) {
            cfg.terms = terms;
        }
        cfg.study = study.resolve();
        if (!event_window.empty()) {
            cfg.event_window = parse_window(event_window);
        }
        cfg.validate();

        if (sub == poll) {
            const auto cameras = feed::load_registry(registry);
            feed::FrameStore store(cfg.out_dir);
            feed::PollerOptions opts;
            opts.interval = interval_secs > 0
                                ? std::chrono::seconds{interval_secs}
                                : std::chrono::seconds{static_cast<long>(interval_minutes * 60)};
            opts.start = parse_rfc3339_or_throw(start, "--start");
            opts.end = parse_rfc3339_or_throw(end, "--end");
            opts.parallelism = parallelism;
            opts.timeout = std::chrono::seconds{timeout};
            opts.realtime = !no_wait;
            const auto n = feed::run_poller(cameras, opts, store);
            out << "appended " << n << " frame records to " << store.log_path().string() << "\n";
        } else if (sub == replay) {
            const auto streams = feed::replay(frames);
            std::string sorted;
            for (const auto& [id, list] : streams) {
                std::size_t ok = 0;
                for (const auto& f : list) {
                    ok += f.payload ? 1 : 0;
                    sorted += feed::to_jsonl(f) + "\n";
                }
                out << id << ": " << list.size() << " frames, " << ok << " ok, "
                    << list.size() - ok << " failed, " << format_rfc3339(list.front().ts_utc)
                    << " .. " << format_rfc3339(list.back().ts_utc) << "\n";
            }
            if (!replay_out.empty()) {
                io::write_file(replay_out, sorted);
            }
        } else if (sub == detect) {
            const auto streams = feed::replay(frames);
            const auto found = disruption::detect_all(streams, cfg.disruption);
            const std::filesystem::path dest =
                detect_out.empty() ? cfg.out_dir / "disruptions.json" : std::filesystem::path{detect_out};
            io::write_file(dest, disruption::format_disruptions_json(found));
            out << found.size() << " disruption interval(s) written to " << dest.string() << "\n";
        } else if (sub == group) {
            const auto cameras = feed::load_registry(registry);
            const auto intervals = disruption::parse_disruptions_json(io::read_file(disruptions));
            const auto chosen = disruption::select_per_camera(intervals, cfg.event_window);
            const auto result = disruption::group_cameras(cameras, chosen);
            const std::filesystem::path dest =
                group_out.empty() ? cfg.out_dir / "groups.json" : std::filesystem::path{group_out};
            io::write_file(dest, disruption::format_groups_json(result));
            out << result.size() << " group(s) from " << chosen.size() << " camera(s) written to "
                << dest.string() << "\n";
        } else if (sub == ingest) {
            const auto parsed = social::parse_posts(posts, cfg.study, strict);
            err << parsed.report.summary();
            const auto matching = social::filter_posts(parsed.posts, social::KeywordFilter(cfg.terms));
            out << "accepted " << parsed.posts.size() << "\n";
            out << "matching " << matching.size() << "\n";
            if (!accepted_out.empty()) {
                std::string text;
                for (const auto& p : parsed.posts) {
                    text += social::to_jsonl(p) + "\n";
                }
                io::write_file(accepted_out, text);
            }
            if (!rejections_out.empty()) {
                io::write_file(rejections_out, parsed.report.to_json());
            }
        } else if (sub == xref) {
            cfg.groups = groups;
            cfg.posts = posts;
            cfg.labels = labels;
            const auto table = run_crossref(cfg, {strict, dedup, emit_matches}, err);
            write_stage_table(table, cfg.out_dir);
            out << "wrote " << (cfg.out_dir / "report.csv").string() << "\n";
        } else if (sub == rep) {
            const auto table = crossref::table_from_json(io::read_file(table_path));
            write_report(table, cfg.out_dir, out);
        } else if (sub == syn) {
            auto spec = synth::load_fixture_spec(spec_path);
            if (seed) {
                spec.seed = *seed;
            }
            const auto fixture = synth::generate_fixture(
                spec, allow_repair ? synth::RepairPolicy::clamp : synth::RepairPolicy::strict);
            for (const auto& r : fixture.repairs) {
                err << "repair: " << r << "\n";
            }
            synth::write_fixture(fixture, cfg.out_dir);
            out << "wrote " << fixture.posts.size() << " posts, " << fixture.cameras.size()
                << " cameras, " << fixture.groups.size() << " groups to "
                << cfg.out_dir.string() << "\n";
        } else if (sub == serve) {
            auto cameras = feed::load_registry(registry);
            auto sched = schedule.empty() ? synth::FailureSchedule{}
                                          : synth::parse_schedule(io::read_file(schedule));
            const Timestamp ep =
                epoch.empty()
                    ? std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now())
                    : parse_rfc3339_or_throw(epoch, "--epoch");
            synth::SimulatorServer server(synth::SnapshotSimulator(
                std::move(cameras), std::move(sched), std::chrono::seconds{serve_interval}, ep));
            out << "serving " << registry << " on " << host << ":" << port << " (tick 0 at "
                << format_rfc3339(ep) << ")\n";
            out.flush();
            server.run(host, port);
        } else if (sub == repro) {
            return reproduce(spec_path, cfg.out_dir, seed, out, err);
        }
        return 0;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace camxref::cli
