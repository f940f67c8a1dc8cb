#pragma once

#include <iosfwd>

namespace atomip::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kParse = 2,
  kIo = 3,
  kUnsupported = 4,
  kOptimizerAbort = 5,
};

/// Entry point of the `atomip` tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace atomip::cli
