#pragma once

#include <iosfwd>

namespace garma {

/// Entry point of the `garma` tool. Exit codes: 0 success, 2 input or config
/// error, 3 stability refusal, 1 internal error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace garma
