#pragma once

#include <iosfwd>

namespace antsess::cli {

// Exit codes of the command-line tool.
inline constexpr int kOk = 0;
inline constexpr int kInternalError = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kInputError = 3;

// Entry point of the `antsess` tool, parameterized on its streams so tests
// can drive it in-process.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace antsess::cli
