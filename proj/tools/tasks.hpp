#pragma once

#include "runconfig.hpp"

namespace halfline::tools {

struct RunOptions {
    bool plots = false;
};

// Executes the configured task, writes results.json plus task CSVs (and SVGs
// when asked) under cfg.out_dir, and returns the process exit code: 0 on
// success, 2 when a computation finished but failed its own verification
// (unconverged disks, unrefined enclosures, oracle disagreement, violated
// bound), 3 when a checked condition does not hold. Library exceptions
// (convergence, precondition, branch cut) propagate to the caller.
int run_task(const RunConfig& cfg, const RunOptions& opt);

}  // namespace halfline::tools
