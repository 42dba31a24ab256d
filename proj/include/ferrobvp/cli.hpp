#pragma once

#include <string>
#include <vector>

namespace ferrobvp::cli {

/// Command-line entry point: bulk, solve, deflate, stability, continue,
/// metric, asymptotics and reproduce. Returns the process exit code.
int run(int argc, char** argv);

/// Figure identifiers understood by `reproduce`.
const std::vector<std::string>& reproducible_figures();

}  // namespace ferrobvp::cli
