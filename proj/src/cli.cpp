#include "cocoflow/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <thread>

#include "cocoflow/io.hpp"

namespace cocoflow {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

bool wants(const RunConfig& cfg, const std::string& format) {
    return std::find(cfg.formats.begin(), cfg.formats.end(), format) != cfg.formats.end();
}

std::string sweep_rows_to_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "gamma,lambda,theta,a1,a2,b,verdict,cir1_nonconverging,theta_form_nonconverging,"
        "theta_claim_nonconverging,claim_matches_roots\n";
    for (const auto& r : rows) {
        out += fmt17(r.gamma) + "," + fmt17(r.lambda) + "," + fmt17(r.theta) + "," + fmt17(r.a1) + "," +
               fmt17(r.a2) + "," + fmt17(r.b) + "," + r.verdict + "," + std::to_string(r.cir1_nonconverging) + "," +
               std::to_string(r.theta_form_nonconverging) + "," + std::to_string(r.theta_claim_nonconverging) + "," +
               std::to_string(r.claim_matches_roots) + "\n";
    }
    return out;
}

std::string boundary_to_csv(const std::vector<std::pair<double, double>>& boundary) {
    std::string out = "gamma,lambda\n";
    for (const auto& [g, l] : boundary) out += fmt17(g) + "," + fmt17(l) + "\n";
    return out;
}

json metadata_json(const std::string& scenario, const ScenarioOverrides& overrides, const ScenarioResult& res) {
    json meta;
    meta["format_version"] = 1;
    meta["scenario"] = scenario;
    meta["overrides"] = overrides_to_json(overrides);
    if (res.system) {
        char buf[20];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(res.system->hash()));
        meta["system_hash"] = std::string(buf);
    }
    if (res.trajectory) {
        meta["integrator"] = {{"t_end", res.trajectory->settings.t_end},
                              {"step", res.trajectory->settings.step},
                              {"sample_every", res.trajectory->settings.sample_every}};
    }
    if (res.anchor) {
        meta["anchor"] = res.anchor->p;
        meta["anchor_residual"] = res.anchor->residual;
    }
    return meta;
}

}  // namespace

int cmd_simulate(const RunConfig& cfg) {
    try {
        if (cfg.scenario.empty()) throw SpecError("no scenario selected (set scenario.name)");
        const ScenarioResult res = run_scenario(cfg.scenario, cfg.overrides);

        fs::create_directories(cfg.out_dir);
        const std::string base = cfg.out_dir + "/";

        if (res.trajectory) {
            if (wants(cfg, "csv")) write_text_file(base + "trajectory.csv", trajectory_to_csv(*res.trajectory, res.diagnostics));
            if (wants(cfg, "jsonl"))
                write_text_file(base + "trajectory.jsonl", trajectory_to_jsonl(*res.trajectory, res.diagnostics));
            write_text_file(base + "metadata.json", metadata_json(cfg.scenario, cfg.overrides, res).dump(2) + "\n");
        }
        if (!res.sweep_rows.empty() && wants(cfg, "csv")) {
            write_text_file(base + "sweep.csv", sweep_rows_to_csv(res.sweep_rows));
            write_text_file(base + "boundary.csv", boundary_to_csv(res.boundary));
        }
        if (wants(cfg, "json-report")) {
            if (res.report) write_text_file(base + "report.json", report_to_json(*res.report).dump(2) + "\n");
            write_text_file(base + "summary.json", res.summary.dump(2) + "\n");
        }
        std::cout << cfg.scenario << ": " << (res.pass ? "verdict pass" : "verdict fail") << "\n";
        return res.pass ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_sweep(const RunConfig& cfg) {
    try {
        if (!cfg.sweep) throw SpecError("sweep requires sweep.gamma and sweep.theta grid axes");
        const SweepSpec& sw = *cfg.sweep;
        if (sw.gamma.count < 1 || sw.theta.count < 1) throw SpecError("empty sweep grid");

        const int ng = sw.gamma.count, nt = sw.theta.count;
        const std::size_t total = static_cast<std::size_t>(ng) * static_cast<std::size_t>(nt);
        std::vector<SweepRow> rows(total);

        auto grid_value = [](const SweepAxis& ax, int i) {
            if (ax.count == 1) return ax.lo;
            return ax.lo + (ax.hi - ax.lo) * static_cast<double>(i) / static_cast<double>(ax.count - 1);
        };

        auto work = [&](std::size_t begin, std::size_t end) {
            for (std::size_t idx = begin; idx < end; ++idx) {
                const int i = static_cast<int>(idx) / nt;
                const int j = static_cast<int>(idx) % nt;
                const double g = grid_value(sw.gamma, i);
                const double theta = grid_value(sw.theta, j);
                const double lambda = theta / (g * g);
                const StabilityVerdict v = classify(RotationCase{g, lambda});
                SweepRow row;
                row.gamma = g;
                row.lambda = lambda;
                row.theta = v.theta;
                row.a1 = v.roots.a1;
                row.a2 = v.roots.a2;
                row.b = v.roots.b;
                row.verdict = to_string(v.verdict);
                row.cir1_nonconverging = v.cir1_nonconverging;
                row.theta_form_nonconverging = v.theta_form_nonconverging;
                row.theta_claim_nonconverging = v.theta_claim_nonconverging;
                row.claim_matches_roots = v.claim_matches_roots;
                rows[idx] = std::move(row);
            }
        };

        const int jobs = std::max(1, cfg.jobs);
        if (jobs == 1 || total < 2) {
            work(0, total);
        } else {
            std::vector<std::thread> pool;
            const std::size_t chunk = (total + static_cast<std::size_t>(jobs) - 1) / static_cast<std::size_t>(jobs);
            for (int w = 0; w < jobs; ++w) {
                const std::size_t b = static_cast<std::size_t>(w) * chunk;
                const std::size_t e = std::min(total, b + chunk);
                if (b >= e) break;
                pool.emplace_back(work, b, e);
            }
            for (auto& t : pool) t.join();
        }

        fs::create_directories(cfg.out_dir);
        write_text_file(cfg.out_dir + "/sweep.csv", sweep_rows_to_csv(rows));
        std::vector<std::pair<double, double>> boundary;
        for (int i = 0; i < ng; ++i) {
            const double g = grid_value(sw.gamma, i);
            boundary.emplace_back(g, 1.0 / (g * g));
        }
        write_text_file(cfg.out_dir + "/boundary.csv", boundary_to_csv(boundary));
        std::cout << "sweep: " << total << " grid points written\n";
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_report(const std::string& trajectory_path, const std::string& metadata_path, const std::string& out_dir,
               const Vec& anchor_override) {
    try {
        const json meta = json::parse(read_text_file(metadata_path));
        const std::string scenario = meta.at("scenario").get<std::string>();
        const ScenarioOverrides overrides = overrides_from_json(meta.at("overrides"));

        const auto built = build_scenario_system(scenario, overrides);
        if (!built) throw SpecError("scenario '" + scenario + "' has no trajectory to report on");
        const SystemSpec& sys = built->system;

        const std::string text = read_text_file(trajectory_path);
        StoredTrajectory stored;
        if (trajectory_path.size() >= 6 && trajectory_path.substr(trajectory_path.size() - 6) == ".jsonl")
            stored = parse_trajectory_jsonl(text);
        else
            stored = parse_trajectory_csv(text);

        AnchorPoint anchor;
        if (!anchor_override.empty()) {
            anchor.p = anchor_override;
            anchor.residual = norm(add(sys.phi().gradient(anchor.p), sys.op().apply(anchor.p)));
        } else if (meta.contains("anchor")) {
            anchor.p = meta.at("anchor").get<Vec>();
            anchor.residual = meta.contains("anchor_residual") ? meta.at("anchor_residual").get<double>() : 0.0;
        } else {
            anchor = find_equilibrium(sys, built->anchor_guess, 1e-10);
        }

        const auto diag = attach_diagnostics(stored.trajectory, sys, anchor);
        const ConvergenceReport rep = convergence_report(stored.trajectory, diag, sys, anchor);

        fs::create_directories(out_dir);
        write_text_file(out_dir + "/report.json", report_to_json(rep).dump(2) + "\n");
        std::cout << "report: " << (rep.pass ? "verdict pass" : "verdict fail") << "\n";
        return rep.pass ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_list_scenarios() {
    for (const auto& n : scenario_names()) std::cout << n << "\n";
    return 0;
}

}  // namespace cocoflow
