#pragma once

#include <iosfwd>

namespace thermoscan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNoModules = 2;

// Entry point of the thermoscan command line; returns the process exit code.
// Diagnostics go to `err` as a single line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace thermoscan::cli
