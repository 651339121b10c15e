#pragma once

// Built-in experiment catalog: each scenario assembles a system, integrates
// it, attaches diagnostics and produces a convergence report plus a
// scenario-specific summary.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cocoflow/applications.hpp"
#include "cocoflow/diagnostics.hpp"
#include "cocoflow/sharpness.hpp"

namespace cocoflow {

struct ScenarioOverrides {
    std::optional<double> gamma;
    std::optional<double> lambda;
    std::optional<double> mu;
    std::optional<double> coupling;
    std::optional<double> lambda_saddle;
    std::optional<std::string> eps_kind;  // zero | power | exponential
    std::optional<double> eps_c;
    std::optional<double> eps_p;
    std::optional<double> eps_a;
    std::optional<Vec> init_u;
    std::optional<Vec> init_v;
    std::optional<double> horizon;
    std::optional<double> step;
    std::optional<int> sample_every;
    std::optional<double> alpha;
    std::optional<double> nu;
    std::optional<double> beta;
    std::optional<int> iterations;
    std::optional<double> rescale_k;
    std::uint64_t seed = 42;
};

struct SweepRow {
    double gamma = 0.0;
    double lambda = 0.0;
    double theta = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double b = 0.0;
    std::string verdict;
    bool cir1_nonconverging = false;
    bool theta_form_nonconverging = false;
    bool theta_claim_nonconverging = false;
    bool claim_matches_roots = true;
};

struct ScenarioResult {
    std::string scenario;
    std::optional<SystemSpec> system;
    std::optional<Trajectory> trajectory;
    std::vector<DiagnosticsSample> diagnostics;
    std::optional<AnchorPoint> anchor;
    std::optional<ConvergenceReport> report;
    nlohmann::json summary;
    bool pass = true;
    std::vector<SweepRow> sweep_rows;              // sharpness sweep only
    std::vector<std::pair<double, double>> boundary;  // theta = 1 curve (gamma, lambda)
};

const std::vector<std::string>& scenario_names();
bool is_scenario(const std::string& name);

/// Executes build -> integrate -> diagnose -> report with catalog defaults
/// and the given overrides. Throws SpecError for unknown scenarios or
/// invalid overrides.
ScenarioResult run_scenario(const std::string& name, const ScenarioOverrides& overrides = {});

struct ScenarioSystem {
    SystemSpec system;
    Vec anchor_guess;
};

/// The system a trajectory scenario integrates, without running it; empty
/// for scenarios that have no single ODE system (discrete game, sweep).
std::optional<ScenarioSystem> build_scenario_system(const std::string& name, const ScenarioOverrides& overrides);

}  // namespace cocoflow
