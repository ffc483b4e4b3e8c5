#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace symcanon::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitVerdict = 3;  ///< demo finished but the mode ordering failed

/// args excludes the program name. JSON results go to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace symcanon::cli
