#include "camxref/io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <json.hpp>

using namespace camxref;
using testing::run_cli;

TEST_CASE("usage errors exit 1")
{
    CHECK(run_cli({}).code == 1);
    const auto r = run_cli({"detect", "--frames", "x", "--bogus"});
    CHECK(r.code == 1);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(run_cli({"crossref", "--groups", "g.json", "--posts", "p.jsonl", "--scales", "10,2"}).code == 1);
    CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("missing input files exit 2")
{
    testing::TempDir dir;
    CHECK(run_cli({"detect", "--frames", (dir.path() / "none.jsonl").string(), "--out", dir.path().string()}).code == 2);
}

TEST_CASE("staged pipeline matches reproduce")
{
    testing::TempDir dir;
    const auto spec = (testing::source_dir() / "fixtures" / "table1.json").string();
    const auto d = dir.path();
    const auto whole = run_cli({"reproduce", spec, "--out", (d / "whole").string()});
    CHECK(whole.code == 1); // the clamped Miami cell differs from its target
    CHECK(whole.out.find("Miami (row 7) instagram @ 20 mi: expected 751, got 748") != std::string::npos);

    CHECK(run_cli({"synth", "--spec", spec, "--out", (d / "fx").string()}).code == 1);
    REQUIRE(run_cli({"synth", "--spec", spec, "--out", (d / "fx").string(), "--allow-repair"}).code == 0);
    REQUIRE(run_cli({"crossref", "--groups", (d / "fx/groups.json").string(), "--posts",
                     (d / "fx/posts.jsonl").string(), "--labels", (d / "fx/labels.csv").string(), "--term", "Irma",
                     "--scales", "2,10,20", "--out", (d / "staged").string()})
                .code == 0);
    REQUIRE(run_cli({"report", "--table", (d / "staged/table.json").string(), "--out", (d / "staged").string()}).code == 0);
    CHECK(io::read_file(d / "staged/report.csv") == io::read_file(d / "whole/report.csv"));
    CHECK(io::read_file(d / "staged/stats.json") == io::read_file(d / "whole/stats.json"));

    const auto ingest = run_cli({"ingest-posts", "--posts", (d / "fx/posts.jsonl").string()});
    CHECK(ingest.code == 0);
    CHECK(ingest.out.find("matching 8800") != std::string::npos);
}

TEST_CASE("a perturbed cell is named in the diff")
{
    testing::TempDir dir;
    auto j = nlohmann::ordered_json::parse(io::read_file(testing::source_dir() / "fixtures" / "table1.json"));
    j["groups"][6]["instagram"][2] = 748;
    io::write_file(dir.path() / "consistent.json", j.dump(2));
    auto r = run_cli({"reproduce", (dir.path() / "consistent.json").string(), "--out", (dir.path() / "a").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("PASS") != std::string::npos);

    j["groups"][0]["keyword"][2] = 11;
    io::write_file(dir.path() / "perturbed.json", j.dump(2));
    r = run_cli({"reproduce", (dir.path() / "perturbed.json").string(), "--out", (dir.path() / "b").string()});
    CHECK(r.code == 1);
    CHECK(r.out.find("Naples (row 1) keyword @ 20 mi: expected 11, got 10") != std::string::npos);
    CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("config file supplies defaults")
{
    testing::TempDir dir;
    const auto d = dir.path();
    const auto spec = (testing::source_dir() / "fixtures" / "table1.json").string();
    REQUIRE(run_cli({"synth", "--spec", spec, "--out", (d / "fx").string(), "--allow-repair"}).code == 0);
    nlohmann::json cfg{{"posts", (d / "fx/posts.jsonl").string()}, {"term", {"storm"}}};
    io::write_file(d / "cfg.json", cfg.dump());
    auto r = run_cli({"ingest-posts", "--config", (d / "cfg.json").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("matching 8800") == std::string::npos);
    r = run_cli({"ingest-posts", "--config", (d / "cfg.json").string(), "--term", "Irma"});
    CHECK(r.out.find("matching 8800") != std::string::npos);
}

TEST_CASE("group rebuilds the generated groups from registry and disruptions")
{
    testing::TempDir dir;
    const auto d = dir.path();
    const auto spec = (testing::source_dir() / "fixtures" / "table1.json").string();
    REQUIRE(run_cli({"synth", "--spec", spec, "--out", (d / "fx").string(), "--allow-repair"}).code == 0);
    const auto r = run_cli({"group", "--registry", (d / "fx/cameras.csv").string(), "--disruptions",
                            (d / "fx/disruptions.json").string(), "--out", (d / "g").string()});
    CHECK(r.code == 0);
    CHECK(io::read_file(d / "g/groups.json") == io::read_file(d / "fx/groups.json"));
}
