#pragma once

#include "camxref/disruption.hpp"
#include "camxref/social.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace camxref::cli {

/// Pipeline parameters shared by the subcommands. Every field can come from a
/// `--config` JSON file with flat keys named like the long flags; flags win.
struct Config {
    std::filesystem::path registry;
    std::filesystem::path frames;
    std::filesystem::path posts;
    std::filesystem::path labels;
    std::filesystem::path groups;
    std::filesystem::path disruptions;
    std::filesystem::path out_dir;
    social::StudyWindow study = social::default_study_window();
    std::vector<double> scales_miles{2.0, 10.0, 20.0};
    std::vector<std::string> terms{"Irma"};
    disruption::DisruptionParams disruption;
    std::optional<disruption::EventWindow> event_window;

    /// Throws ValidationError on non-increasing scales or an empty term.
    void validate() const;
};

/// Output directory default: $CAMXREF_OUT, else "out".
std::filesystem::path default_out_dir();

/// Runs the command line (args[0] is the program name).
/// Exit codes: 0 success, 1 usage or validation error, 2 I/O error.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace camxref::cli
