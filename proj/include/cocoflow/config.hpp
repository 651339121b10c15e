#pragma once

// Flat key-value run configuration with dotted sections. Lines look like
//   scenario.name = yosida-rotation
//   integrator.step = 1e-3
// '#' starts a comment. Unknown keys are rejected by name with line/column.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cocoflow/scenarios.hpp"

namespace cocoflow {

class ConfigError : public Error {
public:
    ConfigError(const std::string& msg, std::size_t line, std::size_t column)
        : Error("config line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
          line(line),
          column(column) {}
    std::size_t line;
    std::size_t column;
};

struct SweepAxis {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
};

struct SweepSpec {
    SweepAxis gamma;
    /// theta = lambda * gamma^2 axis; lambda is derived per grid point
    SweepAxis theta;
};

struct RunConfig {
    std::string scenario;
    ScenarioOverrides overrides;
    std::optional<SweepSpec> sweep;
    std::string out_dir = "out";
    std::vector<std::string> formats = {"csv", "jsonl", "json-report"};
    int jobs = 1;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

nlohmann::json overrides_to_json(const ScenarioOverrides& o);
ScenarioOverrides overrides_from_json(const nlohmann::json& j);

}  // namespace cocoflow
