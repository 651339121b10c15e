#pragma once

// Trajectory and report serialization. CSV columns:
//   t, u_0..u_{n-1}, v_0..v_{n-1}, running_l2_velocity
//   [, gamma0, gamma1, h, w, a_residual, d_term, eq_residual]
// JSON-lines carries the same fields per line and round-trips bit-exactly.

#include <string>
#include <vector>

#include "json.hpp"

#include "cocoflow/diagnostics.hpp"
#include "cocoflow/dynamics.hpp"

namespace cocoflow {

class FormatError : public Error {
public:
    using Error::Error;
};

struct StoredTrajectory {
    Trajectory trajectory;
    std::vector<DiagnosticsSample> diagnostics;  // empty when not stored
    bool has_diagnostics = false;
};

std::string trajectory_to_csv(const Trajectory& traj, const std::vector<DiagnosticsSample>& diag = {});
std::string trajectory_to_jsonl(const Trajectory& traj, const std::vector<DiagnosticsSample>& diag = {});

StoredTrajectory parse_trajectory_csv(const std::string& text);
StoredTrajectory parse_trajectory_jsonl(const std::string& text);

nlohmann::json report_to_json(const ConvergenceReport& rep);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace cocoflow
