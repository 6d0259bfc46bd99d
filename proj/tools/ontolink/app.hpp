#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ontolink::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitInvalid = 2;

/// Runs the command line `args` (without the program name). Returns the
/// process exit code: 0 success, 1 partial failure, 2 invalid input or
/// configuration.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ontolink::app
