#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cohomqe {

/// Runs one command line. `args` excludes the program name.
/// Exit codes: 0 success, 1 a "false" answer (decide, failed verify),
/// 2 usage error, 3 computation error. Errors go to `err` as a JSON object.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cohomqe
