#pragma once

#include <iosfwd>

#include "chns/config.hpp"
#include "chns/verification.hpp"

namespace chns {

/// Time-steps the configured problem, writing the energy history CSV and
/// VTK snapshots into output.dir. Returns a process exit status.
int cmd_run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Runs the manufactured-solution refinement study and writes the rate
/// table to `log` and rates.csv into output.dir.
int cmd_converge(const RunConfig& config, const std::vector<int>& n_list,
                 std::ostream& log, std::ostream& err);

} // namespace chns
