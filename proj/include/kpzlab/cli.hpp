#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kpzlab {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitPass = 0, kExitInternal = 1, kExitBlowUp = 2, kExitConfig = 3 };

/// kpzlab <simulate|invariance|constants|regularity|cole-hopf|feynman-kac>
///        --config FILE [--check] [--seed S] [--out DIR]
/// args excludes the program name. A failed --check returns kExitInternal.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kpzlab
