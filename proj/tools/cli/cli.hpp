#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "cohemark/error.hpp"

namespace cohemark::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitAllFailed = 4;
inline constexpr int kExitRemote = 5;

int exit_code_for(Errc code);

/// Runs one command line (without the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cohemark::cli
