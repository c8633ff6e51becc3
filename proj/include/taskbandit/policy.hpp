#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "taskbandit/rng.hpp"

namespace taskbandit {

// Default hyperparameters for the task-selection use case.
inline constexpr double kDefaultGamma = 0.9;
inline constexpr double kDefaultSlope = 1e-4;
inline constexpr double kDefaultTauInit = 0.05;
inline constexpr double kDefaultTauMaxBound = 0.5;
inline constexpr double kDefaultPrimaryPrior = 0.3;

// Per-arm posterior bookkeeping.
struct ArmState {
    double mu_hat = 0.0;    // estimated expected reward
    double mu_tilde = 0.0;  // discounted cumulative reward
    double n_disc = 0.0;    // discounted number of plays
    double tau = 0.0;       // sampling standard deviation

    friend bool operator==(const ArmState&, const ArmState&) = default;
};

// Hyperparameters of the discounted Gaussian Thompson sampler.
struct PolicyConfig {
    double gamma = kDefaultGamma;  // discount factor, in (0, 1]
    double slope = kDefaultSlope;  // per-round growth of the variance cap
    std::vector<double> tau_init;  // per-arm initial sampling stddev, each in (0, tau_max_bound]
    double tau_max_bound = kDefaultTauMaxBound;
    std::vector<double> prior_mu_hat;    // initial mean estimates
    std::vector<double> prior_mu_tilde;  // initial discounted cumulative rewards
    std::vector<double> prior_n;         // initial discounted play counts, each >= 0
    int primary_arm = 0;

    // Optional clipping of rewards before the posterior update. Off by
    // default; exposed for ablation.
    bool clip_rewards = false;
    double clip_lo = -1.0;
    double clip_hi = 1.0;
};

// Priors used throughout: a slightly stronger prior on the primary arm
// (mean estimate and discounted cumulative reward both 0.3), zeros elsewhere.
inline PolicyConfig default_policy_config(int n_arms, int primary_arm = 0) {
    PolicyConfig cfg;
    cfg.tau_init.assign(n_arms, kDefaultTauInit);
    cfg.prior_mu_hat.assign(n_arms, 0.0);
    cfg.prior_mu_tilde.assign(n_arms, 0.0);
    cfg.prior_n.assign(n_arms, 0.0);
    cfg.primary_arm = primary_arm;
    if (primary_arm >= 0 && primary_arm < n_arms) {
        cfg.prior_mu_hat[primary_arm] = kDefaultPrimaryPrior;
        cfg.prior_mu_tilde[primary_arm] = kDefaultPrimaryPrior;
    }
    return cfg;
}

// One round's selection outcome.
struct Decision {
    int round = 1;                        // round index, first round is 1
    std::vector<double> sampled_indices;  // per-arm samples; empty for non-sampling policies
    int chosen_arm = 0;
};

// Index of the maximum element; ties resolve to the lowest index.
inline int argmax_lowest(const std::vector<double>& values) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

namespace detail {

inline void validate_policy_config(const PolicyConfig& cfg, int n_arms) {
    if (n_arms < 1) throw std::invalid_argument("policy: n_arms must be >= 1");
    if (!(cfg.gamma > 0.0) || cfg.gamma > 1.0)
        throw std::invalid_argument("policy: gamma must be in (0, 1]");
    if (cfg.slope < 0.0) throw std::invalid_argument("policy: slope must be >= 0");
    if (!(cfg.tau_max_bound > 0.0))
        throw std::invalid_argument("policy: tau_max_bound must be > 0");
    const auto n = static_cast<std::size_t>(n_arms);
    if (cfg.tau_init.size() != n || cfg.prior_mu_hat.size() != n ||
        cfg.prior_mu_tilde.size() != n || cfg.prior_n.size() != n)
        throw std::invalid_argument("policy: per-arm config vectors must have length n_arms");
    for (double t : cfg.tau_init) {
        if (!(t > 0.0)) throw std::invalid_argument("policy: tau_init must be > 0");
        if (t > cfg.tau_max_bound)
            throw std::invalid_argument("policy: tau_init must be <= tau_max_bound");
    }
    for (double p : cfg.prior_n) {
        if (p < 0.0) throw std::invalid_argument("policy: prior_n must be >= 0");
    }
    if (cfg.primary_arm < 0 || cfg.primary_arm >= n_arms)
        throw std::invalid_argument("policy: primary_arm out of range");
    if (cfg.clip_rewards && !(cfg.clip_lo <= cfg.clip_hi))
        throw std::invalid_argument("policy: clip interval is empty");
}

}  // namespace detail

// Discounted Gaussian Thompson sampling.
//
// Each arm keeps a discounted cumulative reward and a discounted play count;
// both shrink by gamma every round, so old evidence decays and the policy
// keeps adapting when arm utilities drift. Selection samples one index per
// arm from N(mu_hat, tau^2) and plays the argmax. The sampling deviation of
// a played arm shrinks toward 1/sqrt(n_disc) while idle arms drift back up
// to a cap that grows linearly per round until tau_max_bound.
//
// With gamma = 1 and slope = 0 this reduces to stationary Gaussian Thompson
// sampling with a fixed variance cap of tau_init.
class GaussianTsPolicy {
public:
    GaussianTsPolicy(PolicyConfig config, int n_arms) : cfg_(std::move(config)) {
        detail::validate_policy_config(cfg_, n_arms);
        arms_.resize(n_arms);
        for (int i = 0; i < n_arms; ++i) {
            arms_[i].mu_hat = cfg_.prior_mu_hat[i];
            arms_[i].mu_tilde = cfg_.prior_mu_tilde[i];
            arms_[i].n_disc = cfg_.prior_n[i];
            arms_[i].tau = cfg_.tau_init[i];
        }
    }

    // Draws one sample per arm and returns the argmax. Does not touch the
    // arm statistics; only the stream advances.
    Decision select(RandomStream& rng) const {
        Decision d;
        d.round = round_;
        d.sampled_indices.resize(arms_.size());
        for (std::size_t i = 0; i < arms_.size(); ++i) {
            d.sampled_indices[i] = rng.normal(arms_[i].mu_hat, arms_[i].tau);
        }
        d.chosen_arm = argmax_lowest(d.sampled_indices);
        return d;
    }

    // Applies the discounted recurrences to every arm and advances the round.
    // A never-played arm (n_disc == 0) keeps its prior mean and carries
    // tau = tau_max exactly.
    void update(int chosen_arm, double reward) {
        if (chosen_arm < 0 || chosen_arm >= static_cast<int>(arms_.size()))
            throw std::out_of_range("policy: chosen_arm out of range");
        if (!std::isfinite(reward))
            throw std::invalid_argument("policy: reward must be finite");
        if (cfg_.clip_rewards) reward = std::clamp(reward, cfg_.clip_lo, cfg_.clip_hi);

        const double t = static_cast<double>(round_);
        for (std::size_t i = 0; i < arms_.size(); ++i) {
            ArmState& a = arms_[i];
            const bool played = static_cast<int>(i) == chosen_arm;
            a.mu_tilde = cfg_.gamma * a.mu_tilde + (played ? reward : 0.0);
            a.n_disc = cfg_.gamma * a.n_disc + (played ? 1.0 : 0.0);
            const double tau_max = std::min(cfg_.slope * t + cfg_.tau_init[i], cfg_.tau_max_bound);
            if (a.n_disc > 0.0) {
                a.mu_hat = a.mu_tilde / a.n_disc;
                a.tau = std::min(1.0 / std::sqrt(a.n_disc), tau_max);
            } else {
                a.tau = tau_max;
            }
        }
        ++round_;
    }

    int round() const { return round_; }
    int n_arms() const { return static_cast<int>(arms_.size()); }
    const std::vector<ArmState>& arms() const { return arms_; }
    const PolicyConfig& config() const { return cfg_; }

private:
    PolicyConfig cfg_;
    std::vector<ArmState> arms_;
    int round_ = 1;
};

// Baseline: every arm with probability 1/K.
class UniformRandomPolicy {
public:
    explicit UniformRandomPolicy(int n_arms) : n_arms_(n_arms) {
        if (n_arms < 1) throw std::invalid_argument("policy: n_arms must be >= 1");
    }

    Decision select(RandomStream& rng) const {
        Decision d;
        d.round = round_;
        d.chosen_arm = rng.uniform_int(n_arms_);
        return d;
    }

    void update(int chosen_arm, double /*reward*/) {
        if (chosen_arm < 0 || chosen_arm >= n_arms_)
            throw std::out_of_range("policy: chosen_arm out of range");
        ++round_;
    }

    int round() const { return round_; }
    int n_arms() const { return n_arms_; }
    const std::vector<ArmState>& arms() const { return kNoArms; }

private:
    inline static const std::vector<ArmState> kNoArms{};
    int n_arms_ = 1;
    int round_ = 1;
};

// Baseline: always the designated arm.
class FixedArmPolicy {
public:
    FixedArmPolicy(int n_arms, int arm) : n_arms_(n_arms), arm_(arm) {
        if (n_arms < 1) throw std::invalid_argument("policy: n_arms must be >= 1");
        if (arm < 0 || arm >= n_arms) throw std::invalid_argument("policy: fixed arm out of range");
    }

    Decision select(RandomStream& /*rng*/) const {
        Decision d;
        d.round = round_;
        d.chosen_arm = arm_;
        return d;
    }

    void update(int chosen_arm, double /*reward*/) {
        if (chosen_arm < 0 || chosen_arm >= n_arms_)
            throw std::out_of_range("policy: chosen_arm out of range");
        ++round_;
    }

    int round() const { return round_; }
    int n_arms() const { return n_arms_; }
    const std::vector<ArmState>& arms() const { return kNoArms; }

private:
    inline static const std::vector<ArmState> kNoArms{};
    int n_arms_ = 1;
    int arm_ = 0;
    int round_ = 1;
};

enum class PolicyKind { discounted_ts, stationary_ts, uniform, fixed };

inline std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::discounted_ts: return "discounted-ts";
        case PolicyKind::stationary_ts: return "stationary-ts";
        case PolicyKind::uniform: return "uniform";
        case PolicyKind::fixed: return "fixed";
    }
    return "unknown";
}

inline PolicyKind policy_kind_from_string(const std::string& s) {
    if (s == "discounted-ts") return PolicyKind::discounted_ts;
    if (s == "stationary-ts") return PolicyKind::stationary_ts;
    if (s == "uniform") return PolicyKind::uniform;
    if (s == "fixed") return PolicyKind::fixed;
    throw std::invalid_argument("unknown policy kind: " + s);
}

// Value-type wrapper giving the four policies one sequential-decision
// interface. Policies are self-contained values: copy one per trial and
// never share it between writers.
class Policy {
public:
    Policy(GaussianTsPolicy p) : impl_(std::move(p)) {}
    Policy(UniformRandomPolicy p) : impl_(std::move(p)) {}
    Policy(FixedArmPolicy p) : impl_(std::move(p)) {}

    Decision select(RandomStream& rng) const {
        return std::visit([&rng](const auto& p) { return p.select(rng); }, impl_);
    }

    void update(int chosen_arm, double reward) {
        std::visit([&](auto& p) { p.update(chosen_arm, reward); }, impl_);
    }

    int round() const {
        return std::visit([](const auto& p) { return p.round(); }, impl_);
    }

    int n_arms() const {
        return std::visit([](const auto& p) { return p.n_arms(); }, impl_);
    }

    // Post-update arm statistics; empty for the uniform and fixed baselines.
    const std::vector<ArmState>& arms() const {
        return std::visit([](const auto& p) -> const std::vector<ArmState>& { return p.arms(); },
                          impl_);
    }

private:
    std::variant<GaussianTsPolicy, UniformRandomPolicy, FixedArmPolicy> impl_;
};

// Builds a policy of the given kind. stationary-ts is the gamma = 1,
// slope = 0 reduction of the discounted sampler, so undiscounted updates and
// a variance cap that never grows.
inline Policy make_policy(PolicyKind kind, const PolicyConfig& config, int n_arms) {
    switch (kind) {
        case PolicyKind::discounted_ts:
            return Policy(GaussianTsPolicy(config, n_arms));
        case PolicyKind::stationary_ts: {
            PolicyConfig stationary = config;
            stationary.gamma = 1.0;
            stationary.slope = 0.0;
            return Policy(GaussianTsPolicy(std::move(stationary), n_arms));
        }
        case PolicyKind::uniform:
            return Policy(UniformRandomPolicy(n_arms));
        case PolicyKind::fixed:
            return Policy(FixedArmPolicy(n_arms, config.primary_arm));
    }
    throw std::invalid_argument("unknown policy kind");
}

}  // namespace taskbandit
