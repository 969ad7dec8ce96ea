#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace strainmix {

struct CliOptions {
  bool color = false;  // ANSI color for diagnostics
};

/// Runs one command line (program name excluded). Results go to `out` or the
/// --out file; diagnostics go to `err`. Returns 0 on success, 1 for domain
/// errors (positivity, empty cells), 2 for usage and input errors.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                const CliOptions& options = {});

}  // namespace strainmix
