#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace relcompose::cli {

/// Exit codes of every subcommand.
enum Exit : int { ok = 0, negative = 1, budget = 2, input_error = 3 };

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace relcompose::cli
