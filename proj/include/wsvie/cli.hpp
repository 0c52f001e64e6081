#pragma once

#include <iosfwd>

namespace wsvie::cli {

// Exit codes: 0 success, 1 computation failure, 2 usage, validation or I/O error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `svie` tool. `--out -` writes to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace wsvie::cli
