#pragma once

#include <string>
#include <vector>

namespace qzrp::cli {

enum ExitCode : int {
  kOk = 0,
  kBadInput = 2,
  kPrecisionFailure = 3,
  kSolverFailure = 4,
};

struct Output {
  int exit_code = kOk;
  std::string out;  // JSON or CSV document (empty when written to --out)
  std::string err;
};

/// Runs one command line. `args` excludes the program name, e.g.
/// {"exact", "--n", "4", "--p", "2", "--q", "1/2"}.
Output run(const std::vector<std::string>& args);

}  // namespace qzrp::cli
