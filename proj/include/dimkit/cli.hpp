#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dimkit {

/// Runs one command line (without the program name). Writes the JSON report
/// to `out` and diagnostics to `err`. Returns 0 on success, 1 on a verified
/// negative result (invalid witness, failed bound, ...), 2 on usage, schema
/// or precondition errors.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dimkit
