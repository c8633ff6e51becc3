#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "taskbandit/policy.hpp"

namespace taskbandit {

// One simulation round as persisted: the decision, the observed reward, the
// post-update arm statistics, and the environment ground truth for regret.
// oracle fields are optional (oracle_best_arm == -1 means absent); val_score
// is an opaque per-step validation score, NaN when the environment has none.
struct StepRecord {
    int round = 0;
    int chosen_arm = 0;
    double reward = 0.0;
    std::vector<double> sampled_indices;
    std::vector<ArmState> arm_states;
    int oracle_best_arm = -1;
    double oracle_mean = std::numeric_limits<double>::quiet_NaN();
    double chosen_mean = std::numeric_limits<double>::quiet_NaN();
    double val_score = std::numeric_limits<double>::quiet_NaN();
};

// Ordered step records plus the identity of the run that produced them; the
// unit of persistence and analysis.
struct TrialTrace {
    std::string config_digest;
    std::uint64_t seed = 0;
    std::string policy;
    std::string environment;
    int n_arms = 0;
    int horizon = 0;
    std::vector<StepRecord> steps;
};

inline bool has_oracle_annotations(const TrialTrace& trace) {
    for (const auto& s : trace.steps) {
        if (s.oracle_best_arm < 0 || !std::isfinite(s.oracle_mean) ||
            !std::isfinite(s.chosen_mean))
            return false;
    }
    return !trace.steps.empty();
}

namespace detail {

inline nlohmann::json arm_state_to_json(const ArmState& a) {
    return nlohmann::json{{"mu_hat", a.mu_hat},
                          {"mu_tilde", a.mu_tilde},
                          {"n_disc", a.n_disc},
                          {"tau", a.tau}};
}

inline ArmState arm_state_from_json(const nlohmann::json& j) {
    ArmState a;
    a.mu_hat = j.at("mu_hat").get<double>();
    a.mu_tilde = j.at("mu_tilde").get<double>();
    a.n_disc = j.at("n_disc").get<double>();
    a.tau = j.at("tau").get<double>();
    return a;
}

}  // namespace detail

// Line-delimited JSON: a header object, then one object per step. Keys are
// emitted in sorted order and doubles with shortest round-trip formatting,
// so identical traces serialize to identical bytes.
inline void write_trace_jsonl(const TrialTrace& trace, std::ostream& out) {
    nlohmann::json header{{"config_digest", trace.config_digest},
                          {"seed", trace.seed},
                          {"policy", trace.policy},
                          {"environment", trace.environment},
                          {"n_arms", trace.n_arms},
                          {"horizon", trace.horizon}};
    out << header.dump() << '\n';
    for (const auto& s : trace.steps) {
        nlohmann::json j{{"round", s.round},
                         {"chosen_arm", s.chosen_arm},
                         {"reward", s.reward}};
        if (!s.sampled_indices.empty()) j["sampled_indices"] = s.sampled_indices;
        if (!s.arm_states.empty()) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& a : s.arm_states) arr.push_back(detail::arm_state_to_json(a));
            j["arm_states"] = std::move(arr);
        }
        if (s.oracle_best_arm >= 0) {
            j["oracle_best_arm"] = s.oracle_best_arm;
            j["oracle_mean"] = s.oracle_mean;
            j["chosen_mean"] = s.chosen_mean;
        }
        if (std::isfinite(s.val_score)) j["val_score"] = s.val_score;
        out << j.dump() << '\n';
    }
}

inline void write_trace_file(const TrialTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open trace file for writing: " + path.string());
    write_trace_jsonl(trace, out);
    if (!out) throw std::runtime_error("failed writing trace file: " + path.string());
}

inline TrialTrace read_trace_jsonl(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trace: empty input");
    nlohmann::json header = nlohmann::json::parse(line);

    TrialTrace trace;
    trace.config_digest = header.value("config_digest", std::string{});
    trace.seed = header.value("seed", std::uint64_t{0});
    trace.policy = header.value("policy", std::string{});
    trace.environment = header.value("environment", std::string{});
    trace.n_arms = header.value("n_arms", 0);
    trace.horizon = header.value("horizon", 0);

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        StepRecord s;
        s.round = j.at("round").get<int>();
        s.chosen_arm = j.at("chosen_arm").get<int>();
        s.reward = j.at("reward").get<double>();
        if (j.contains("sampled_indices"))
            s.sampled_indices = j["sampled_indices"].get<std::vector<double>>();
        if (j.contains("arm_states")) {
            for (const auto& a : j["arm_states"])
                s.arm_states.push_back(detail::arm_state_from_json(a));
        }
        if (j.contains("oracle_best_arm")) {
            s.oracle_best_arm = j["oracle_best_arm"].get<int>();
            s.oracle_mean = j.value("oracle_mean", std::numeric_limits<double>::quiet_NaN());
            s.chosen_mean = j.value("chosen_mean", std::numeric_limits<double>::quiet_NaN());
        }
        if (j.contains("val_score")) s.val_score = j["val_score"].get<double>();
        trace.steps.push_back(std::move(s));
    }
    if (trace.n_arms == 0 && !trace.steps.empty()) {
        int max_arm = 0;
        for (const auto& s : trace.steps) max_arm = std::max(max_arm, s.chosen_arm);
        trace.n_arms = max_arm + 1;
    }
    if (trace.horizon == 0) trace.horizon = static_cast<int>(trace.steps.size());
    return trace;
}

inline TrialTrace read_trace_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open trace file: " + path.string());
    return read_trace_jsonl(in);
}

}  // namespace taskbandit
