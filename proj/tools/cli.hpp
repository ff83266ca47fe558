#pragma once

#include <iosfwd>

namespace gramlab::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;     // verification failed or numerical failure
inline constexpr int kInfeasible = 2;  // bounds report printed but infeasible
inline constexpr int kUsage = 64;
inline constexpr int kDataError = 65;
inline constexpr int kNoInput = 66;
inline constexpr int kCantCreate = 73;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gramlab::cli
