#pragma once

#include <ostream>

namespace crf {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitDegeneracy = 3;

/// The `crf` command line. Returns the process exit code; with several
/// scenarios the largest code wins.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace crf
