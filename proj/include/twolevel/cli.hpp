#pragma once

namespace twolevel {

// Entry point of the command-line surface. Exit status: 0 success,
// 1 config/validation error, 2 numerical non-convergence.
int run_cli(int argc, const char* const* argv);

} // namespace twolevel
