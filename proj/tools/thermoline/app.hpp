#pragma once

#include <iosfwd>

namespace thermoline::cli {

// Full command-line entry point with injectable streams so tests can run the
// tool in-process. Returns the process exit code: 0 success, 2 configuration
// error, 3 runtime or I/O error.
int main_impl(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace thermoline::cli
