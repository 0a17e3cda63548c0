#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace claimalign::cli {

/// Runs one subcommand (label, match, eval-match, eval-labels, stats, split,
/// undersample, triplets, chi2, viz). Machine-readable results go to `out`,
/// diagnostics and progress to `err`. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, with `args` excluding the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace claimalign::cli
