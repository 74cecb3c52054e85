#pragma once

#include <iosfwd>

namespace xkerr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point of the xkerr tool. Output that is not redirected by --out or
/// --summary goes to `out`; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xkerr::cli
