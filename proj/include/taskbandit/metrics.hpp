#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "taskbandit/trace.hpp"

namespace taskbandit {

// Per-arm empirical selection frequencies over a trailing window.
// series[arm][k] is the frequency of `arm` among the `window` choices ending
// at round first_round + k; the per-arm values at any k sum to 1.
struct SelectionProbabilitySeries {
    int window = 1;
    int first_round = 1;
    std::vector<std::vector<double>> series;

    int length() const { return series.empty() ? 0 : static_cast<int>(series[0].size()); }
};

inline SelectionProbabilitySeries selection_probability(const std::vector<int>& choices,
                                                        int n_arms, int window) {
    if (window < 1) throw std::invalid_argument("metrics: window must be >= 1");
    if (window > static_cast<int>(choices.size()))
        throw std::invalid_argument("metrics: window exceeds trace length");
    if (n_arms < 1) throw std::invalid_argument("metrics: n_arms must be >= 1");

    const int total = static_cast<int>(choices.size());
    const int points = total - window + 1;
    SelectionProbabilitySeries out;
    out.window = window;
    out.first_round = window;
    out.series.assign(n_arms, std::vector<double>(points, 0.0));

    std::vector<int> counts(n_arms, 0);
    auto arm_at = [&](int idx) {
        const int a = choices[idx];
        if (a < 0 || a >= n_arms) throw std::invalid_argument("metrics: choice out of range");
        return a;
    };
    for (int i = 0; i < window; ++i) ++counts[arm_at(i)];
    for (int k = 0;; ++k) {
        for (int a = 0; a < n_arms; ++a)
            out.series[a][k] = static_cast<double>(counts[a]) / window;
        if (k + 1 >= points) break;
        --counts[arm_at(k)];
        ++counts[arm_at(k + window)];
    }
    return out;
}

inline SelectionProbabilitySeries selection_probability(const TrialTrace& trace, int window) {
    std::vector<int> choices;
    choices.reserve(trace.steps.size());
    for (const auto& s : trace.steps) choices.push_back(s.chosen_arm);
    int n_arms = trace.n_arms;
    for (int c : choices) n_arms = std::max(n_arms, c + 1);
    return selection_probability(choices, std::max(n_arms, 1), window);
}

inline double cumulative_reward(const TrialTrace& trace) {
    double sum = 0.0;
    for (const auto& s : trace.steps) sum += s.reward;
    return sum;
}

// Cumulative gap between the per-round oracle arm's true mean and the chosen
// arm's true mean. Needs the ground-truth annotations recorded in
// simulation; returns nullopt when a step lacks them.
inline std::optional<std::vector<double>> dynamic_regret(const TrialTrace& trace) {
    if (!has_oracle_annotations(trace)) return std::nullopt;
    std::vector<double> regret;
    regret.reserve(trace.steps.size());
    double sum = 0.0;
    for (const auto& s : trace.steps) {
        sum += s.oracle_mean - s.chosen_mean;
        regret.push_back(sum);
    }
    return regret;
}

}  // namespace taskbandit
