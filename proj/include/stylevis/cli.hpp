#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stylevis::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitStageFailure = 1;
inline constexpr int kExitConfigError = 2;

/// Entry point behind the `stylevis` binary. `args` excludes the program
/// name. Subcommands: ingest, prompts, images, assign, serve, export,
/// report, all.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stylevis::cli
