// cocoflow: configuration-driven runner for damped second-order dynamics
// driven by sums of potential gradients and cocoercive operators.

#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "cocoflow/cli.hpp"

namespace {

cocoflow::Vec parse_anchor(const std::string& text) {
    cocoflow::Vec v;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cocoflow: dissipative second-order dynamics laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir, formats, anchor_text, metadata_path, trajectory_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
        sub->add_option_function<std::uint64_t>(
               "--seed", [&](const std::uint64_t& s) { seed = s; seed_set = true; },
               "random seed (overrides config)");
        sub->add_option("--format", formats, "comma-separated output formats: csv,jsonl,json-report");
        sub->add_option("--jobs", jobs, "worker threads for sweeps");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run one scenario end-to-end");
    add_common(simulate);

    CLI::App* sweep = app.add_subcommand("sweep", "classify the rotation case over a parameter grid");
    add_common(sweep);

    CLI::App* report = app.add_subcommand("report", "recompute diagnostics from stored trajectories");
    report->add_option("trajectory", trajectory_path, "trajectory file (.jsonl or .csv)")->required();
    report->add_option("--metadata", metadata_path, "sidecar metadata JSON (default: metadata.json next to input)");
    report->add_option("--out", out_dir, "output directory");
    report->add_option("--anchor", anchor_text, "override anchor point, comma-separated");

    app.add_subcommand("list-scenarios", "print the scenario catalog");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("list-scenarios")) return cocoflow::cmd_list_scenarios();

        if (app.got_subcommand("report")) {
            if (metadata_path.empty()) {
                const auto slash = trajectory_path.find_last_of('/');
                const std::string dir = slash == std::string::npos ? "." : trajectory_path.substr(0, slash);
                metadata_path = dir + "/metadata.json";
            }
            const std::string out = out_dir.empty() ? "." : out_dir;
            cocoflow::Vec anchor;
            if (!anchor_text.empty()) anchor = parse_anchor(anchor_text);
            return cocoflow::cmd_report(trajectory_path, metadata_path, out, anchor);
        }

        cocoflow::RunConfig cfg = cocoflow::parse_config_file(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed_set) cfg.overrides.seed = seed;
        if (jobs > 0) cfg.jobs = jobs;
        if (!formats.empty()) {
            cfg.formats.clear();
            std::stringstream ss(formats);
            std::string cell;
            while (std::getline(ss, cell, ',')) cfg.formats.push_back(cell);
        }

        if (app.got_subcommand("simulate")) return cocoflow::cmd_simulate(cfg);
        if (app.got_subcommand("sweep")) return cocoflow::cmd_sweep(cfg);
        return 1;
    } catch (const cocoflow::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
