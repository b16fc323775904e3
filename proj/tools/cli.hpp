#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mdms::cli {

/// Runs one mdms invocation. args excludes the program name.
/// Exit codes: 0 success, 1 untainted certificate failure, 2 usage, I/O,
/// cap or budget errors.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mdms::cli
