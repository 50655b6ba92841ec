#pragma once

#include <string>
#include <vector>

namespace kreg::cli {

// Command-line entry point. Exit status: 0 on success, 1 on data or I/O
// errors, 2 on usage errors.
int run(int argc, const char* const* argv);

// Convenience overload; args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace kreg::cli
