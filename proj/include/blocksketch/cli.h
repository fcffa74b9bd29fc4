#ifndef BLOCKSKETCH_CLI_H_
#define BLOCKSKETCH_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace blocksketch {

enum ExitCode : int {
  kExitOk = 0,
  kExitRecoveryFailure = 1,
  kExitUsage = 2,
  kExitSolver = 3,
};

// Entry point of the blocksketch command line. args excludes the program
// name. Data goes to out, diagnostics and usage text to err.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace blocksketch

#endif  // BLOCKSKETCH_CLI_H_
