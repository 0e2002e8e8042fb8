#ifndef SCENRISK_CLI_HPP
#define SCENRISK_CLI_HPP

namespace scenrisk {

// Full command-line entry point. Returns the process exit code: 0 on
// success, 2 on validation failures, 3 on numerical non-convergence.
int run_cli(int argc, const char* const* argv);

}  // namespace scenrisk

#endif  // SCENRISK_CLI_HPP
