#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace netscore {

/// Dispatches one CLI invocation. Data goes to `out`, diagnostics to `err`.
/// Returns 0 on success, 1 on usage errors, 2 on data or validation errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace netscore
