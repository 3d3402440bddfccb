#ifndef GTF_CLI_HPP
#define GTF_CLI_HPP

#include <string>

#include "gtf/config.hpp"

namespace gtf {

// Command bodies shared by the gtf binary and the tests. Each returns the
// process exit code: 0 success, 2 config/input error, 3 numerical/degeneracy
// or protocol failure.
int cmd_simulate(const RunConfig& config, const std::string& out_dir);
int cmd_calibrate(const RunConfig& config, const std::string& out_dir);
int cmd_solve(const RunConfig& config, const std::string& out_dir);
int cmd_analyze(const RunConfig& config, const std::string& out_dir, int parallel = 1);

// Parses argv, loads the config, applies overrides and dispatches.
int run_cli(int argc, char** argv);

}  // namespace gtf

#endif  // GTF_CLI_HPP
