#pragma once

#include <string>
#include <vector>

namespace paulisim {

// Parse arguments (excluding argv[0]) and run one subcommand. Returns the
// process exit code: 0 success, 2 input error, 3 guard abort, 4 statistical
// refusal. Reports go to the --output path as JSON; stdout carries a short
// human summary.
int run_cli(const std::vector<std::string>& args);

// argv-style wrapper for main().
int run_cli(int argc, const char* const* argv);

}  // namespace paulisim
