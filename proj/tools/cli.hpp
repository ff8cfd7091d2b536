#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cpimpute::cli {

/// Runs the command line `args` (without the program name). Returns the
/// process exit status; diagnostics go to `err`, reports to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cpimpute::cli
