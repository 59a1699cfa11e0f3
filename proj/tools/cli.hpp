#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tmts::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRejected = 1;
inline constexpr int kUsage = 2;

// Runs one command line (args[0] is the program name). `in` feeds the
// predictor answers of `generate`; reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace tmts::cli
