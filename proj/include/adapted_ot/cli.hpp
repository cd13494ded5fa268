#pragma once

#include <string>
#include <vector>

namespace aot::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitAcceptance = 4;

/// Entry point of the command-line tool; args[0] is the program name.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

/// Path of the JSON sidecar written next to `output`.
std::string sidecar_path(const std::string& output);

}  // namespace aot::cli
