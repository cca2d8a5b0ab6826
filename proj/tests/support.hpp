#pragma once

#include "camxref/crossref.hpp"
#include "camxref/disruption.hpp"
#include "camxref/social.hpp"
#include "camxref/synth.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace camxref::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

std::filesystem::path source_dir();

/// Runs the CLI entry point with argv[0] prepended.
struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};
CliResult run_cli(std::vector<std::string> args);

using Rng = std::mt19937_64;

std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi);
double uniform_real(Rng& rng, double lo, double hi);

/// Full-scan join: every post whose point lies in the scale box and whose time
/// lies in the group's closed window, as sorted post ids.
std::vector<std::string> brute_force_join(const disruption::CameraGroup& group, double scale_miles,
                                          const std::vector<social::SocialPost>& posts);

/// Random posts around the given groups, a share of them exactly on box edges
/// and window bounds.
std::vector<social::SocialPost> random_posts(Rng& rng, const std::vector<disruption::CameraGroup>& groups,
                                             const std::vector<double>& scales, std::size_t count);

std::vector<disruption::CameraGroup> random_groups(Rng& rng, std::size_t count);

/// A feasible spec with non-overlapping 20-mile catchments and random funnels.
synth::FixtureSpec random_feasible_spec(Rng& rng);

/// Runs aggregate over a generated fixture the way the CLI does.
crossref::ReportTable pipeline_table(const synth::FixtureSpec& spec, const synth::Fixture& fixture);

} // namespace camxref::testing
