#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace genolang::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_bad_arguments = 2,
    exit_data_error = 3,
    exit_divergence = 4,
};

// Runs one subcommand. `args` excludes the program name. Results go to
// `out`, diagnostics to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace genolang::cli
