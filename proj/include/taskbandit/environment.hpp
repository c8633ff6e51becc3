#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "taskbandit/policy.hpp"
#include "taskbandit/rng.hpp"

namespace taskbandit {

enum class EnvKind { stationary_gaussian, piecewise_stationary, drifting, mtl_proxy };

inline std::string to_string(EnvKind kind) {
    switch (kind) {
        case EnvKind::stationary_gaussian: return "stationary-gaussian";
        case EnvKind::piecewise_stationary: return "piecewise-stationary";
        case EnvKind::drifting: return "drifting";
        case EnvKind::mtl_proxy: return "mtl-proxy";
    }
    return "unknown";
}

inline EnvKind env_kind_from_string(const std::string& s) {
    if (s == "stationary-gaussian") return EnvKind::stationary_gaussian;
    if (s == "piecewise-stationary") return EnvKind::piecewise_stationary;
    if (s == "drifting") return EnvKind::drifting;
    if (s == "mtl-proxy") return EnvKind::mtl_proxy;
    throw std::invalid_argument("unknown environment kind: " + s);
}

// Declarative description of a reward process.
//
// stationary-gaussian: reward(arm) ~ N(means[arm], stddevs[arm]^2).
// piecewise-stationary: stage_means[stage][arm] with Gaussian noise; each
//   changepoint is the last round of its stage, so stage k covers rounds
//   (changepoints[k-1], changepoints[k]].
// drifting: means[arm] + drift[arm] * (round - 1) with Gaussian noise.
// mtl-proxy: pulling an arm yields a validation-score improvement draw over
//   the best score so far; expected improvement per arm is stage-dependent
//   and halves every improvement_half_life[arm] pulls within a stage.
struct EnvironmentSpec {
    EnvKind kind = EnvKind::stationary_gaussian;
    int n_arms = 1;
    int horizon = 1;

    std::vector<double> means;    // stationary-gaussian, drifting
    std::vector<double> stddevs;  // reward noise, all kinds but mtl-proxy

    std::vector<int> changepoints;                 // piecewise-stationary, mtl-proxy
    std::vector<std::vector<double>> stage_means;  // piecewise-stationary, [stage][arm]

    std::vector<double> drift;  // drifting, per-round mean increment

    std::vector<std::vector<double>> improvement_means;  // mtl-proxy, [stage][arm]
    std::vector<double> improvement_half_life;           // mtl-proxy, pulls per halving; <= 0 disables decay
    std::vector<double> improvement_noise;               // mtl-proxy, per-arm draw stddev
    double v_init = 0.0;                                 // mtl-proxy, starting best score

    std::string name;  // preset name when resolved from one, else empty
};

// One round's outcome as seen by the environment, with the ground truth
// needed for regret accounting.
struct RewardSample {
    int round = 0;
    int arm = 0;
    double reward = 0.0;
    int oracle_best_arm = 0;  // arm with the highest true mean this round
    double oracle_mean = 0.0;
    double chosen_mean = 0.0;
    double val_score = std::numeric_limits<double>::quiet_NaN();  // mtl-proxy: score after the pull
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("environment: " + msg);
}

inline void validate_environment_spec(const EnvironmentSpec& spec) {
    require(spec.n_arms >= 1, "n_arms must be >= 1");
    require(spec.horizon >= 1, "horizon must be >= 1");
    const auto n = static_cast<std::size_t>(spec.n_arms);

    for (std::size_t i = 0; i < spec.changepoints.size(); ++i) {
        require(spec.changepoints[i] >= 1 && spec.changepoints[i] < spec.horizon,
                "changepoints must lie in [1, horizon)");
        if (i > 0)
            require(spec.changepoints[i] > spec.changepoints[i - 1],
                    "changepoints must be strictly increasing");
    }

    auto check_stage_table = [&](const std::vector<std::vector<double>>& table,
                                 const char* what) {
        require(table.size() == spec.changepoints.size() + 1,
                std::string(what) + " must have one row per stage");
        for (const auto& row : table)
            require(row.size() == n, std::string(what) + " rows must have length n_arms");
    };

    switch (spec.kind) {
        case EnvKind::stationary_gaussian:
            require(spec.means.size() == n, "means must have length n_arms");
            require(spec.stddevs.size() == n, "stddevs must have length n_arms");
            break;
        case EnvKind::piecewise_stationary:
            check_stage_table(spec.stage_means, "stage_means");
            require(spec.stddevs.size() == n, "stddevs must have length n_arms");
            break;
        case EnvKind::drifting:
            require(spec.means.size() == n, "means must have length n_arms");
            require(spec.stddevs.size() == n, "stddevs must have length n_arms");
            require(spec.drift.size() == n, "drift must have length n_arms");
            break;
        case EnvKind::mtl_proxy:
            check_stage_table(spec.improvement_means, "improvement_means");
            require(spec.improvement_half_life.size() == n,
                    "improvement_half_life must have length n_arms");
            require(spec.improvement_noise.size() == n,
                    "improvement_noise must have length n_arms");
            break;
    }
    for (double s : spec.stddevs) require(s >= 0.0, "stddevs must be >= 0");
    for (double s : spec.improvement_noise) require(s >= 0.0, "improvement_noise must be >= 0");
}

}  // namespace detail

// Reward generator for one trial. A value type: copy it to fork a trajectory
// (the exhaustive test oracles rely on that). Single writer per trial;
// mtl-proxy assumes rounds arrive in order.
class Environment {
public:
    explicit Environment(EnvironmentSpec spec) : spec_(std::move(spec)) {
        detail::validate_environment_spec(spec_);
        if (spec_.kind == EnvKind::mtl_proxy) {
            v_best_ = spec_.v_init;
            stage_pulls_.assign(spec_.n_arms, 0);
        }
    }

    const EnvironmentSpec& spec() const { return spec_; }
    int n_arms() const { return spec_.n_arms; }
    int horizon() const { return spec_.horizon; }

    // Best validation score so far (mtl-proxy only; v_init otherwise).
    double best_score() const { return v_best_; }

    // Stage index of a round: changepoints mark the last round of a stage.
    int stage_of(int round) const {
        int stage = 0;
        for (int c : spec_.changepoints) {
            if (c < round) ++stage;
        }
        return stage;
    }

    // Ground-truth expected reward of pulling `arm` at `round`, given the
    // current state (pull history matters only for mtl-proxy).
    double true_mean(int round, int arm) const {
        check_round_arm(round, arm);
        switch (spec_.kind) {
            case EnvKind::stationary_gaussian:
                return spec_.means[arm];
            case EnvKind::piecewise_stationary:
                return spec_.stage_means[stage_of(round)][arm];
            case EnvKind::drifting:
                return spec_.means[arm] + spec_.drift[arm] * static_cast<double>(round - 1);
            case EnvKind::mtl_proxy:
                return expected_improvement(stage_of(round), arm);
        }
        return 0.0;
    }

    int oracle_best_arm(int round) const {
        std::vector<double> m(spec_.n_arms);
        for (int i = 0; i < spec_.n_arms; ++i) m[i] = true_mean(round, i);
        return argmax_lowest(m);
    }

    // Draws the reward for pulling `arm` at `round` and advances the state.
    RewardSample step(int round, int arm, RandomStream& rng) {
        check_round_arm(round, arm);
        RewardSample out;
        out.round = round;
        out.arm = arm;
        out.oracle_best_arm = oracle_best_arm(round);
        out.oracle_mean = true_mean(round, out.oracle_best_arm);
        out.chosen_mean = true_mean(round, arm);

        if (spec_.kind == EnvKind::mtl_proxy) {
            const int stage = stage_of(round);
            if (stage != current_stage_) {
                // Improvement curves restart at each stage boundary.
                std::fill(stage_pulls_.begin(), stage_pulls_.end(), 0);
                current_stage_ = stage;
            }
            const double draw = rng.normal(out.chosen_mean, spec_.improvement_noise[arm]);
            const double v_t = v_best_ + draw;
            out.reward = v_t - v_best_;
            out.val_score = v_t;
            v_best_ = std::max(v_best_, v_t);
            ++stage_pulls_[arm];
        } else {
            out.reward = rng.normal(out.chosen_mean, spec_.stddevs[arm]);
        }
        return out;
    }

private:
    void check_round_arm(int round, int arm) const {
        if (round < 1 || round > spec_.horizon)
            throw std::out_of_range("environment: round outside [1, horizon]");
        if (arm < 0 || arm >= spec_.n_arms)
            throw std::out_of_range("environment: arm out of range");
    }

    double expected_improvement(int stage, int arm) const {
        const double base = spec_.improvement_means[stage][arm];
        const double hl = spec_.improvement_half_life[arm];
        if (hl <= 0.0) return base;
        const int pulls = (stage == current_stage_) ? stage_pulls_[arm] : 0;
        return base * std::exp2(-static_cast<double>(pulls) / hl);
    }

    EnvironmentSpec spec_;
    double v_best_ = 0.0;
    std::vector<int> stage_pulls_;
    int current_stage_ = 0;
};

// --- Named presets -----------------------------------------------------

// Two-arm stationary benchmark: means 0.8 / 0.2, noise 0.1, horizon 2000.
inline EnvironmentSpec preset_stationary2() {
    EnvironmentSpec spec;
    spec.kind = EnvKind::stationary_gaussian;
    spec.n_arms = 2;
    spec.horizon = 2000;
    spec.means = {0.8, 0.2};
    spec.stddevs = {0.1, 0.1};
    spec.name = "stationary2";
    return spec;
}

// Six-task validation-improvement proxy with four equal utility stages over
// 500 rounds. Arm order: primary, emotion, speaker, arousal, valence,
// dominance. Stage dominance: primary first, then a flat stretch, then the
// emotion arm, then the arousal/valence pair; the speaker and dominance arms
// stay low throughout.
inline EnvironmentSpec preset_fig3_stages() {
    EnvironmentSpec spec;
    spec.kind = EnvKind::mtl_proxy;
    spec.n_arms = 6;
    spec.horizon = 500;
    spec.changepoints = {125, 250, 375};
    spec.improvement_means = {
        //  primary emotion speaker arousal valence dominance
        {1.00, 0.05, 0.01, 0.05, 0.05, 0.01},
        {0.15, 0.18, 0.02, 0.15, 0.15, 0.02},
        {0.06, 1.00, 0.01, 0.08, 0.08, 0.01},
        {0.05, 0.08, 0.01, 0.80, 0.80, 0.01},
    };
    spec.improvement_half_life = {45.0, 45.0, 45.0, 45.0, 45.0, 45.0};
    spec.improvement_noise = {0.06, 0.06, 0.06, 0.06, 0.06, 0.06};
    spec.name = "fig3-stages";
    return spec;
}

// Single-stage proxy with mildly different diminishing improvement curves.
inline EnvironmentSpec preset_mtl_proxy_default() {
    EnvironmentSpec spec;
    spec.kind = EnvKind::mtl_proxy;
    spec.n_arms = 6;
    spec.horizon = 500;
    spec.improvement_means = {{0.50, 0.30, 0.05, 0.20, 0.20, 0.05}};
    spec.improvement_half_life = {60.0, 60.0, 60.0, 60.0, 60.0, 60.0};
    spec.improvement_noise = {0.10, 0.10, 0.10, 0.10, 0.10, 0.10};
    spec.name = "mtl-proxy-default";
    return spec;
}

inline std::vector<std::string> environment_preset_names() {
    return {"stationary2", "fig3-stages", "mtl-proxy-default"};
}

inline EnvironmentSpec make_environment_preset(const std::string& name) {
    if (name == "stationary2") return preset_stationary2();
    if (name == "fig3-stages") return preset_fig3_stages();
    if (name == "mtl-proxy-default") return preset_mtl_proxy_default();
    throw std::invalid_argument("unknown environment preset: " + name);
}

}  // namespace taskbandit
