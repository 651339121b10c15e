#pragma once

// Command implementations behind the CLI. Exit codes: 0 verdict pass,
// 2 verdict fail (so CI can assert convergence), 1 execution error.

#include <string>
#include <vector>

#include "cocoflow/config.hpp"

namespace cocoflow {

int cmd_simulate(const RunConfig& cfg);
int cmd_sweep(const RunConfig& cfg);
/// Recomputes diagnostics and the report from a stored trajectory plus its
/// sidecar metadata; `anchor_override`, when nonempty, replaces the stored
/// anchor point.
int cmd_report(const std::string& trajectory_path, const std::string& metadata_path, const std::string& out_dir,
               const Vec& anchor_override = {});
int cmd_list_scenarios();

}  // namespace cocoflow
