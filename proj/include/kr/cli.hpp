#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace kr::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kValidation = 2;
inline constexpr int kInfeasible = 3;
inline constexpr int kVerification = 4;

/// Runs `krnorm` with `args` (without the program name). Reports go to `out`
/// (or the `--out` file), diagnostics to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "RxC" or "RxCxD" (x count first).
std::array<int, 3> parse_grid_spec(const std::string& spec, int& dim);

}  // namespace kr::cli
