#pragma once

#include <iosfwd>

namespace hyperslice::cli {

enum ExitCode : int { kOk = 0, kDomainFailure = 1, kInputFailure = 2 };

/// Runs the hyperslice command line in-process and returns the exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace hyperslice::cli
