#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crl::cli {

enum ExitCode : int { kOk = 0, kDomain = 1, kUsage = 2, kBudget = 3 };

/// Runs one `crl` invocation. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crl::cli
