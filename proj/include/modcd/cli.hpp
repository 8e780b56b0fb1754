#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace modcd {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumerical = 3,
};

// Runs one CLI invocation (subcommands: detect, louvain, eval, synth, sweep).
// args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace modcd
