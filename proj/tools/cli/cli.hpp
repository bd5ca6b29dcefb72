#ifndef RHC_TOOLS_CLI_HPP_
#define RHC_TOOLS_CLI_HPP_

#include <iosfwd>

namespace rhc::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 2,
  kInputError = 3,
  kInternalError = 4,
};

// Entry point for the `rhc` tool. Data goes to `out`, logs and the one-line
// error record to `err`.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rhc::cli

#endif  // RHC_TOOLS_CLI_HPP_
