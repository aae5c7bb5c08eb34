#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ifsm::cli {

enum ExitCode : int {
  kOk = 0,
  kMalformedInput = 1,
  kValidationFailed = 2,
  kCapOverflow = 3,
};

struct CommandInfo {
  std::string name;
  std::string summary;
  /// library operations this subcommand exposes
  std::vector<std::string> operations;
  /// accepted option names (without leading dashes)
  std::vector<std::string> options;
};

const std::vector<CommandInfo>& commands();

/// Runs `args` (args[0] is the subcommand). Primary output goes to --out
/// or, without it, to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ifsm::cli
