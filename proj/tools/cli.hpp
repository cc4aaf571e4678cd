#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace peerreview::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kIoError = 2 };

/// Runs the tool with `args` (program name excluded). Usage and error text go
/// to `err`, short progress notes to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace peerreview::cli
