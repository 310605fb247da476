#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dunklpot::cli {

enum ExitCode { Ok = 0, Usage = 1, Degenerate = 2, PrecisionLost = 3, SweepFailed = 4 };

/// Runs one command line (without the program name); reports go to `out`
/// unless an --out file is given, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dunklpot::cli
