#pragma once

#include <iosfwd>

namespace celleval {

// Full command-line surface, callable in-process. Returns the process exit
// code: 0 on success, 1 for input/usage errors, 2 for internal errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace celleval
