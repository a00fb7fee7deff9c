#pragma once

#include <string>
#include <vector>

namespace tcond {

// Dispatches one CLI invocation.  Exit codes: 0 success, 2 configuration
// error (diagnostic on stderr), 1 runtime failure (partial manifest written
// when an output directory is known).
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace tcond
