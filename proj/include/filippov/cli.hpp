#pragma once

#include <iosfwd>

namespace filippov::cli {

enum ExitCode : int {
    kOk = 0,
    kExpectationFailed = 1,
    kUsage = 2,
    kNumeric = 3,
};

/// Dispatch one subcommand. Machine output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace filippov::cli
