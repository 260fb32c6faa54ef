#pragma once

#include <iosfwd>

namespace vbwcli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitInput = 2;

/// Runs `vbwtool` with the given arguments. Binary sample streams named "-"
/// use `in` / `out`; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace vbwcli
