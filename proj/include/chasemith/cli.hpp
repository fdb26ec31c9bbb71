#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace chasemith {

enum ExitCode : int {
  kExitYes = 0,
  kExitNo = 1,
  kExitInput = 2,
  kExitNoWithinBound = 3,
  kExitUnsupported = 4,
};

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chasemith
