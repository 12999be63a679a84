#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seleval {

// Full CLI entry point: `args` excludes the program name. Writes results to
// `out` and error messages to `err`; returns the process exit code
// (0 success, 1 validation failure, 2 I/O failure).
int seleval_main(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace seleval
