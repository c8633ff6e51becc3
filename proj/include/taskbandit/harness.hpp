#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "taskbandit/environment.hpp"
#include "taskbandit/metrics.hpp"
#include "taskbandit/policy.hpp"
#include "taskbandit/rng.hpp"
#include "taskbandit/trace.hpp"

namespace taskbandit {

// Invalid user input (config file, preset name, CLI arguments). The CLI maps
// this to exit code 1, everything else unexpected to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputSpec {
    enum class Kind { trace, summary, selection_prob };
    Kind kind = Kind::trace;
    std::string path;
    int window = 30;  // selection-prob only
};

inline std::string to_string(OutputSpec::Kind kind) {
    switch (kind) {
        case OutputSpec::Kind::trace: return "trace";
        case OutputSpec::Kind::summary: return "summary";
        case OutputSpec::Kind::selection_prob: return "selection-prob";
    }
    return "unknown";
}

// A policy-vs-environment matchup: which policy, which reward process, how
// many independent trials, and where the outputs go.
struct ExperimentConfig {
    PolicyKind policy_kind = PolicyKind::discounted_ts;
    PolicyConfig policy;
    EnvironmentSpec environment;
    int trials = 1;
    std::uint64_t base_seed = 0;
    std::vector<OutputSpec> outputs;
};

// --- JSON parsing -------------------------------------------------------

namespace detail {

inline std::vector<double> per_arm_vector(const nlohmann::json& j, int n_arms,
                                          const std::string& field) {
    if (j.is_number()) return std::vector<double>(n_arms, j.get<double>());
    if (j.is_array()) {
        auto v = j.get<std::vector<double>>();
        if (static_cast<int>(v.size()) != n_arms)
            throw ConfigError("config: " + field + " must have length " + std::to_string(n_arms));
        return v;
    }
    throw ConfigError("config: " + field + " must be a number or an array");
}

inline EnvironmentSpec environment_from_json(const nlohmann::json& j) {
    if (j.is_string()) return make_environment_preset(j.get<std::string>());
    if (!j.is_object()) throw ConfigError("config: environment must be a preset name or object");

    EnvironmentSpec spec;
    try {
        spec.kind = env_kind_from_string(j.at("kind").get<std::string>());
        spec.n_arms = j.at("n_arms").get<int>();
        spec.horizon = j.at("horizon").get<int>();
        if (j.contains("means")) spec.means = j["means"].get<std::vector<double>>();
        if (j.contains("stddevs"))
            spec.stddevs = per_arm_vector(j["stddevs"], spec.n_arms, "stddevs");
        if (j.contains("changepoints"))
            spec.changepoints = j["changepoints"].get<std::vector<int>>();
        if (j.contains("stage_means"))
            spec.stage_means = j["stage_means"].get<std::vector<std::vector<double>>>();
        if (j.contains("drift")) spec.drift = j["drift"].get<std::vector<double>>();
        if (j.contains("improvement_means"))
            spec.improvement_means =
                j["improvement_means"].get<std::vector<std::vector<double>>>();
        if (j.contains("improvement_half_life"))
            spec.improvement_half_life =
                per_arm_vector(j["improvement_half_life"], spec.n_arms, "improvement_half_life");
        if (j.contains("improvement_noise"))
            spec.improvement_noise =
                per_arm_vector(j["improvement_noise"], spec.n_arms, "improvement_noise");
        if (j.contains("v_init")) spec.v_init = j["v_init"].get<double>();
        if (j.contains("name")) spec.name = j["name"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: bad environment block: ") + e.what());
    }
    try {
        validate_environment_spec(spec);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return spec;
}

inline PolicyConfig policy_config_from_json(const nlohmann::json& j, int n_arms) {
    PolicyConfig cfg = default_policy_config(n_arms, j.value("primary_arm", 0));
    if (j.contains("gamma")) cfg.gamma = j["gamma"].get<double>();
    if (j.contains("slope")) cfg.slope = j["slope"].get<double>();
    if (j.contains("tau_max_bound")) cfg.tau_max_bound = j["tau_max_bound"].get<double>();
    if (j.contains("tau_init")) cfg.tau_init = per_arm_vector(j["tau_init"], n_arms, "tau_init");
    if (j.contains("prior_mu_hat"))
        cfg.prior_mu_hat = per_arm_vector(j["prior_mu_hat"], n_arms, "prior_mu_hat");
    if (j.contains("prior_mu_tilde"))
        cfg.prior_mu_tilde = per_arm_vector(j["prior_mu_tilde"], n_arms, "prior_mu_tilde");
    if (j.contains("prior_n")) cfg.prior_n = per_arm_vector(j["prior_n"], n_arms, "prior_n");
    if (j.contains("clip_rewards")) cfg.clip_rewards = j["clip_rewards"].get<bool>();
    if (j.contains("clip_lo")) cfg.clip_lo = j["clip_lo"].get<double>();
    if (j.contains("clip_hi")) cfg.clip_hi = j["clip_hi"].get<double>();
    return cfg;
}

inline OutputSpec output_from_json(const nlohmann::json& j) {
    OutputSpec out;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "trace") out.kind = OutputSpec::Kind::trace;
    else if (kind == "summary") out.kind = OutputSpec::Kind::summary;
    else if (kind == "selection-prob") out.kind = OutputSpec::Kind::selection_prob;
    else throw ConfigError("config: unknown output kind: " + kind);
    out.path = j.at("path").get<std::string>();
    if (j.contains("window")) out.window = j["window"].get<int>();
    if (out.window < 1) throw ConfigError("config: output window must be >= 1");
    return out;
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    ExperimentConfig cfg;
    try {
        cfg.environment = detail::environment_from_json(j.at("environment"));

        const nlohmann::json policy = j.value("policy", nlohmann::json::object());
        cfg.policy_kind = policy_kind_from_string(policy.value("kind", "discounted-ts"));
        cfg.policy = detail::policy_config_from_json(policy, cfg.environment.n_arms);

        cfg.trials = j.value("trials", 1);
        if (cfg.trials < 1) throw ConfigError("config: trials must be >= 1");
        cfg.base_seed = j.value("base_seed", std::uint64_t{0});
        if (j.contains("outputs")) {
            for (const auto& o : j["outputs"]) cfg.outputs.push_back(detail::output_from_json(o));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    try {
        make_policy(cfg.policy_kind, cfg.policy, cfg.environment.n_arms);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: invalid JSON in " + path.string() + ": " + e.what());
    }
    return parse_experiment_config(j);
}

// --- Config digest ------------------------------------------------------

namespace detail {

inline nlohmann::json resolved_config_json(const ExperimentConfig& cfg) {
    const PolicyConfig& p = cfg.policy;
    nlohmann::json policy{{"kind", to_string(cfg.policy_kind)},
                          {"gamma", p.gamma},
                          {"slope", p.slope},
                          {"tau_init", p.tau_init},
                          {"tau_max_bound", p.tau_max_bound},
                          {"prior_mu_hat", p.prior_mu_hat},
                          {"prior_mu_tilde", p.prior_mu_tilde},
                          {"prior_n", p.prior_n},
                          {"primary_arm", p.primary_arm},
                          {"clip_rewards", p.clip_rewards},
                          {"clip_lo", p.clip_lo},
                          {"clip_hi", p.clip_hi}};
    const EnvironmentSpec& e = cfg.environment;
    nlohmann::json env{{"kind", to_string(e.kind)},
                       {"n_arms", e.n_arms},
                       {"horizon", e.horizon},
                       {"means", e.means},
                       {"stddevs", e.stddevs},
                       {"changepoints", e.changepoints},
                       {"stage_means", e.stage_means},
                       {"drift", e.drift},
                       {"improvement_means", e.improvement_means},
                       {"improvement_half_life", e.improvement_half_life},
                       {"improvement_noise", e.improvement_noise},
                       {"v_init", e.v_init},
                       {"name", e.name}};
    return nlohmann::json{{"policy", std::move(policy)}, {"environment", std::move(env)}};
}

inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace detail

// Stable hex digest of the resolved policy + environment; seeds and output
// paths are excluded so replays of the same setup share a digest.
inline std::string config_digest(const ExperimentConfig& cfg) {
    const std::uint64_t h = detail::fnv1a64(detail::resolved_config_json(cfg).dump());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

// --- Running ------------------------------------------------------------

struct ExperimentSummary {
    int trials = 0;
    double mean_cum_reward = 0.0;
    double std_cum_reward = 0.0;
    double mean_final_regret = 0.0;
    double std_final_regret = 0.0;
};

struct ExperimentResult {
    std::vector<TrialTrace> traces;
    ExperimentSummary summary;
};

// One seeded trial: select -> environment reward -> update, for `horizon`
// rounds. The policy and the environment draw from independent streams
// derived from the trial seed, so two policies run against the same seed see
// identical reward noise.
inline TrialTrace run_trial(const ExperimentConfig& cfg, std::uint64_t seed) {
    Policy policy = make_policy(cfg.policy_kind, cfg.policy, cfg.environment.n_arms);
    Environment env(cfg.environment);
    RandomStream policy_rng = RandomStream::derive(seed, 0);
    RandomStream env_rng = RandomStream::derive(seed, 1);

    TrialTrace trace;
    trace.config_digest = config_digest(cfg);
    trace.seed = seed;
    trace.policy = to_string(cfg.policy_kind);
    trace.environment = env.spec().name.empty() ? to_string(env.spec().kind) : env.spec().name;
    trace.n_arms = env.n_arms();
    trace.horizon = env.horizon();
    trace.steps.reserve(env.horizon());

    for (int round = 1; round <= env.horizon(); ++round) {
        const Decision decision = policy.select(policy_rng);
        const RewardSample sample = env.step(round, decision.chosen_arm, env_rng);
        policy.update(decision.chosen_arm, sample.reward);

        StepRecord step;
        step.round = round;
        step.chosen_arm = decision.chosen_arm;
        step.reward = sample.reward;
        step.sampled_indices = decision.sampled_indices;
        step.arm_states = policy.arms();
        step.oracle_best_arm = sample.oracle_best_arm;
        step.oracle_mean = sample.oracle_mean;
        step.chosen_mean = sample.chosen_mean;
        step.val_score = sample.val_score;
        trace.steps.push_back(std::move(step));
    }
    return trace;
}

namespace detail {

inline std::pair<double, double> mean_std(const std::vector<double>& xs) {
    const int n = static_cast<int>(xs.size());
    if (n == 0) return {0.0, 0.0};
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    if (n == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1))};
}

// Full-precision, locale-independent decimal formatting.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

inline std::filesystem::path numbered_path(const std::filesystem::path& base, int trial) {
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "_%03d", trial);
    std::filesystem::path out = base;
    out.replace_filename(base.stem().string() + suffix + base.extension().string());
    return out;
}

inline void ensure_parent_dir(const std::filesystem::path& path) {
    const auto parent = path.parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

}  // namespace detail

inline ExperimentSummary summarize_traces(const std::vector<TrialTrace>& traces) {
    std::vector<double> cum, regret;
    bool regret_ok = true;
    for (const auto& t : traces) {
        cum.push_back(cumulative_reward(t));
        if (auto r = dynamic_regret(t); r && !r->empty()) regret.push_back(r->back());
        else regret_ok = false;
    }
    if (!regret_ok)
        throw std::runtime_error("summary: trace lacks oracle annotations, regret unavailable");
    ExperimentSummary s;
    s.trials = static_cast<int>(traces.size());
    auto [mc, sc] = detail::mean_std(cum);
    auto [mr, sr] = detail::mean_std(regret);
    s.mean_cum_reward = mc;
    s.std_cum_reward = sc;
    s.mean_final_regret = mr;
    s.std_final_regret = sr;
    return s;
}

inline void write_summary_csv(const ExperimentConfig& cfg, const ExperimentSummary& s,
                              std::ostream& out) {
    const std::string env_name = cfg.environment.name.empty() ? to_string(cfg.environment.kind)
                                                              : cfg.environment.name;
    out << "policy,env,trials,mean_cum_reward,std_cum_reward,mean_final_regret,std_final_regret\n";
    out << to_string(cfg.policy_kind) << ',' << env_name << ',' << s.trials << ','
        << detail::format_double(s.mean_cum_reward) << ','
        << detail::format_double(s.std_cum_reward) << ','
        << detail::format_double(s.mean_final_regret) << ','
        << detail::format_double(s.std_final_regret) << '\n';
}

inline void write_selection_prob_csv(const SelectionProbabilitySeries& series, std::ostream& out) {
    const int n_arms = static_cast<int>(series.series.size());
    out << "round";
    for (int a = 0; a < n_arms; ++a) out << ",arm_" << a;
    out << '\n';
    for (int k = 0; k < series.length(); ++k) {
        out << (series.first_round + k);
        for (int a = 0; a < n_arms; ++a) out << ',' << detail::format_double(series.series[a][k]);
        out << '\n';
    }
}

// Runs all trials (seeds base_seed, base_seed + 1, ...), writes the requested
// outputs, and returns the traces plus the cross-trial summary. Per-trial
// output kinds get a _NNN suffix per trial; `out_dir`, when given, reroots
// relative output paths.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const std::filesystem::path& out_dir = {}) {
    ExperimentResult result;
    result.traces.reserve(cfg.trials);
    for (int trial = 0; trial < cfg.trials; ++trial) {
        result.traces.push_back(run_trial(cfg, cfg.base_seed + static_cast<std::uint64_t>(trial)));
    }
    result.summary = summarize_traces(result.traces);

    for (const auto& spec : cfg.outputs) {
        std::filesystem::path path = spec.path;
        if (!out_dir.empty() && path.is_relative()) path = out_dir / path;
        detail::ensure_parent_dir(path);
        switch (spec.kind) {
            case OutputSpec::Kind::trace:
                for (int trial = 0; trial < cfg.trials; ++trial) {
                    const auto p = cfg.trials > 1 ? detail::numbered_path(path, trial) : path;
                    write_trace_file(result.traces[trial], p);
                }
                break;
            case OutputSpec::Kind::summary: {
                std::ofstream out(path, std::ios::binary);
                if (!out) throw std::runtime_error("cannot open output file: " + path.string());
                write_summary_csv(cfg, result.summary, out);
                break;
            }
            case OutputSpec::Kind::selection_prob:
                if (spec.window > cfg.environment.horizon)
                    throw ConfigError("config: selection-prob window exceeds horizon");
                for (int trial = 0; trial < cfg.trials; ++trial) {
                    const auto p = cfg.trials > 1 ? detail::numbered_path(path, trial) : path;
                    std::ofstream out(p, std::ios::binary);
                    if (!out)
                        throw std::runtime_error("cannot open output file: " + p.string());
                    write_selection_prob_csv(
                        selection_probability(result.traces[trial], spec.window), out);
                }
                break;
        }
    }
    return result;
}

}  // namespace taskbandit
