#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gridflex::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kValidation = 2,
  kOracleCap = 3,
};

/// Entry point of the `gridflex` tool; writes artifacts to disk or `out`
/// and diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gridflex::cli
