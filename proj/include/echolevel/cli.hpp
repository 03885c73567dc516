#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace echolevel {

/// Runs the command line with `args` excluding the program name.
/// Exit codes: 0 ok, 1 usage error, 2 runtime error. Errors are written to
/// `err` as a single line "error: <kind>: <message>".
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace echolevel
