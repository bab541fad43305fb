#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kglink::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFormatError = 2,
  kMissingArtifact = 3,
  kConfigError = 4,
};

/// Runs the command line `args` (args[0] is the program name) against the
/// given streams and returns the process exit code.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace kglink::cli
