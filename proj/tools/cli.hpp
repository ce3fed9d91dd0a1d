#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tuba
{

/// Runs one CLI invocation. args[0] is the program name.
/// Exit codes: 0 success, 1 data error, 2 usage error. Errors go to `err` as
/// a single JSON line.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace tuba
