#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mindiv {

/// Runs the command line tool. args excludes the program name.
/// Exit codes: 0 success, 1 input or usage error, 2 estimate did not converge.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mindiv
