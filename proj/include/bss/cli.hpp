#pragma once

#include "bss/error.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace bss::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kConfig = 2,
    kInvalidParams = 3,
    kResourceLimit = 4,
    kNonConvergence = 5,
    kRegime = 6,
    kMismatchedSpace = 7,
    kIo = 8,
    kNumerical = 9,  ///< singular, degenerate, absorbing state, bad rank or index
    kUsage = 10,
};

[[nodiscard]] int exit_code(ErrorKind kind) noexcept;

/// Runs one subcommand. `args` excludes the program name. Errors are reported
/// as a one-line JSON record on `err`; the return value is the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bss::cli
