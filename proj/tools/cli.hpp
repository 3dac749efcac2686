#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace crossguard::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kValidation = 2,  // bad or missing scenario or log
  kSafety = 3,      // a run recorded a safety violation
  kOutput = 4,      // could not write an output file
};

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crossguard::cli
