// Command-line front end for the bandit task-selection simulator.
//
//   taskbandit run --config exp.json [--trials N] [--seed S] [--out DIR]
//   taskbandit metrics --trace trace.jsonl --window 30 [--out series.csv]
//   taskbandit presets list
//
// Exit codes: 0 success, 1 config error, 2 runtime error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "taskbandit/taskbandit.hpp"

namespace {

int cmd_run(const std::string& config_path, int trials_override,
            std::int64_t seed_override, const std::string& out_dir) {
    taskbandit::ExperimentConfig cfg = taskbandit::load_experiment_config(config_path);
    if (trials_override > 0) cfg.trials = trials_override;
    if (seed_override >= 0) cfg.base_seed = static_cast<std::uint64_t>(seed_override);

    const auto result = taskbandit::run_experiment(cfg, out_dir);
    taskbandit::write_summary_csv(cfg, result.summary, std::cout);
    return 0;
}

int cmd_metrics(const std::string& trace_path, int window, const std::string& out_path) {
    const taskbandit::TrialTrace trace = taskbandit::read_trace_file(trace_path);
    if (window > static_cast<int>(trace.steps.size()))
        throw taskbandit::ConfigError("metrics: window exceeds trace length");

    const auto series = taskbandit::selection_probability(trace, window);
    if (out_path.empty()) {
        taskbandit::write_selection_prob_csv(series, std::cout);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + out_path);
        taskbandit::write_selection_prob_csv(series, out);
    }
    return 0;
}

int cmd_presets_list() {
    for (const auto& name : taskbandit::environment_preset_names()) {
        const auto spec = taskbandit::make_environment_preset(name);
        std::cout << name << "  kind=" << taskbandit::to_string(spec.kind)
                  << "  arms=" << spec.n_arms << "  horizon=" << spec.horizon << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-stationary multi-armed bandit task-selection simulator"};
    app.require_subcommand(1);

    std::string config_path;
    int trials_override = 0;
    std::int64_t seed_override = -1;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "Run a configured experiment");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--trials", trials_override, "Override the number of trials");
    run->add_option("--seed", seed_override, "Override the base seed");
    run->add_option("--out", out_dir, "Directory to reroot relative output paths");

    std::string trace_path, metrics_out;
    int window = 30;
    auto* metrics = app.add_subcommand("metrics", "Compute metrics from a persisted trace");
    metrics->add_option("--trace", trace_path, "Trace file (JSON Lines)")->required();
    metrics->add_option("--window", window, "Sliding window length");
    metrics->add_option("--out", metrics_out, "Output CSV path (default: stdout)");

    auto* presets = app.add_subcommand("presets", "Environment presets");
    auto* presets_list = presets->add_subcommand("list", "List available presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, trials_override, seed_override, out_dir);
        if (metrics->parsed()) {
            if (window < 1) throw taskbandit::ConfigError("metrics: window must be >= 1");
            return cmd_metrics(trace_path, window, metrics_out);
        }
        if (presets->parsed()) {
            if (presets_list->parsed() || presets->get_subcommands().empty())
                return cmd_presets_list();
        }
    } catch (const taskbandit::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
