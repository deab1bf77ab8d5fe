#pragma once

// Command implementations behind the `ahrs_cli` executable. Each returns a process exit
// code; diagnostics go to `err`, human-readable summaries to `out`.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "ahrs/pipeline.hpp"

namespace ahrs::cli {

enum ExitCode : int {
  kSuccess = 0,
  kMalformedInput = 1,  // unreadable or malformed sensor log (message cites the line)
  kInvalidConfig = 2,   // config, maneuver script or sweep spec rejected; bad invocation
  kDiverged = 3,        // estimator diverged during replay
};

struct CommonOptions {
  std::optional<std::string> config_path;
  std::optional<std::string> out_path;  // stdout when absent
  std::optional<std::uint64_t> seed;
  std::optional<EstimatorKind> estimator;
};

/// Replays a sensor log and writes one estimate row per accepted frame.
int replay(const std::string& log_path, const CommonOptions& options, std::ostream& out, std::ostream& err);

/// Generates truth from a maneuver script and writes the corrupted sensor log with truth columns.
int simulate(const std::string& script_path, const CommonOptions& options, std::ostream& out, std::ostream& err);

/// Runs the tolerance sweeps of a sweep spec and writes the tolerance table.
int sweep(const std::string& spec_path, const CommonOptions& options, std::ostream& out, std::ostream& err);

/// Parses the command line and dispatches to a subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ahrs::cli
