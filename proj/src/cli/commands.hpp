// CLI command implementations, kept as library functions so the test suite
// can drive them in-process.  Every command writes the exact resolved config
// next to its outputs; re-running from that file reproduces the reports.
#pragma once

#include <string>

#include "hessianlab/io.hpp"

namespace hessianlab::cli {

struct RunOptions {
  Config config;
  std::string out_dir;
};

int cmd_identities(const RunOptions& run);
int cmd_inequality(const RunOptions& run);
int cmd_search(const RunOptions& run);
int cmd_solve_radial(const RunOptions& run);
int cmd_solve_grid(const RunOptions& run);
int cmd_rigidity(const RunOptions& run);

// creates the output directory, archives the resolved config, runs the
// command; exit codes: 0 verdict complete, 1 numerical failure, 2 usage
int dispatch(const std::string& command, RunOptions run);

}  // namespace hessianlab::cli
