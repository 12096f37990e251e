#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace anicon::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,    // bad flags, parse errors, bad config
  kDomain = 2,   // domain or admissibility failure, refused factor
  kStrict = 3,   // some verdict fails under --strict
};

/// Runs the command line in-process; output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace anicon::cli
