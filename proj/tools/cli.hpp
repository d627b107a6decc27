#pragma once

#include <iosfwd>

namespace mirt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitGate = 3;

/// Runs one `mirt` subcommand. Reports go to `out`, one-line diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mirt::cli
