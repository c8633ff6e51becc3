#include <doctest.h>

#include <cmath>
#include <vector>

#include "taskbandit/policy.hpp"
#include "taskbandit/rng.hpp"

using namespace taskbandit;

TEST_CASE("default config puts the stronger prior on the primary arm") {
    GaussianTsPolicy policy(default_policy_config(6, 0), 6);
    CHECK(policy.round() == 1);
    CHECK(policy.arms()[0].mu_hat == doctest::Approx(0.3));
    CHECK(policy.arms()[0].mu_tilde == doctest::Approx(0.3));
    for (int i = 1; i < 6; ++i) {
        CHECK(policy.arms()[i].mu_hat == 0.0);
        CHECK(policy.arms()[i].mu_tilde == 0.0);
    }
    for (const auto& arm : policy.arms()) {
        CHECK(arm.tau == doctest::Approx(0.05));
        CHECK(arm.n_disc == 0.0);
    }
}

TEST_CASE("single-arm config is valid") {
    GaussianTsPolicy policy(default_policy_config(1, 0), 1);
    CHECK(policy.n_arms() == 1);
    CHECK(policy.arms()[0].mu_hat == doctest::Approx(0.3));
}

TEST_CASE("config validation rejects bad inputs") {
    auto cfg = default_policy_config(3, 0);

    SUBCASE("gamma outside (0, 1]") {
        cfg.gamma = 1.2;
        CHECK_THROWS_AS(GaussianTsPolicy(cfg, 3), std::invalid_argument);
        cfg.gamma = 0.0;
        CHECK_THROWS_AS(GaussianTsPolicy(cfg, 3), std::invalid_argument);
        cfg.gamma = -0.5;
        CHECK_THROWS_AS(GaussianTsPolicy(cfg, 3), std::invalid_argument);
    }
    SUBCASE("mismatched vector lengths") {
        cfg.tau_init.pop_back();
        CHECK_THROWS_AS(GaussianTsPolicy(cfg, 3), std::invalid_argument);
    }
    SUBCASE("non-positive tau") {
        cfg.tau_init[1] = 0.0;
        CHECK_THROWS_AS(GaussianTsPolicy(cfg, 3), std::invalid_argument);
    }
    SUBCASE("tau_init above the cap") {
        cfg.tau_init[2] = cfg.tau_max_bound * 2;
        CHECK_THROWS_AS(GaussianTsPolicy(cfg, 3), std::invalid_argument);
    }
    SUBCASE("negative prior_n") {
        cfg.prior_n[0] = -1.0;
        CHECK_THROWS_AS(GaussianTsPolicy(cfg, 3), std::invalid_argument);
    }
    SUBCASE("negative slope") {
        cfg.slope = -0.01;
        CHECK_THROWS_AS(GaussianTsPolicy(cfg, 3), std::invalid_argument);
    }
}

TEST_CASE("argmax breaks ties toward the lowest index") {
    CHECK(argmax_lowest({1.0, 1.0, 0.5}) == 0);
    CHECK(argmax_lowest({0.2, 0.7, 0.7}) == 1);
    CHECK(argmax_lowest({0.0}) == 0);
}

TEST_CASE("select with vanishing variance reduces to the argmax of means") {
    auto cfg = default_policy_config(2, 0);
    cfg.tau_init = {1e-12, 1e-12};
    GaussianTsPolicy policy(cfg, 2);
    RandomStream rng(7);
    for (int i = 0; i < 1000; ++i) {
        CHECK(policy.select(rng).chosen_arm == 0);
    }
}

TEST_CASE("select does not mutate arm statistics") {
    GaussianTsPolicy policy(default_policy_config(4, 0), 4);
    const auto before = policy.arms();
    RandomStream rng(3);
    for (int i = 0; i < 10; ++i) policy.select(rng);
    CHECK(policy.arms() == before);
    CHECK(policy.round() == 1);
}

TEST_CASE("identical arms are picked with equal frequency") {
    auto cfg = default_policy_config(2, 0);
    cfg.prior_mu_hat = {0.0, 0.0};
    cfg.prior_mu_tilde = {0.0, 0.0};
    GaussianTsPolicy policy(cfg, 2);
    RandomStream rng(11);
    int first = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        if (policy.select(rng).chosen_arm == 0) ++first;
    }
    CHECK(static_cast<double>(first) / draws == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("select is deterministic under a fixed seed") {
    const auto cfg = default_policy_config(6, 0);
    GaussianTsPolicy a(cfg, 6), b(cfg, 6);
    RandomStream rng_a(42), rng_b(42);
    for (int i = 0; i < 50; ++i) {
        const Decision da = a.select(rng_a);
        const Decision db = b.select(rng_b);
        CHECK(da.chosen_arm == db.chosen_arm);
        CHECK(da.sampled_indices == db.sampled_indices);
    }
}

TEST_CASE("update applies the discounted recurrences") {
    auto cfg = default_policy_config(6, 0);  // gamma 0.9, primary prior 0.3
    GaussianTsPolicy policy(cfg, 6);

    policy.update(0, 0.5);

    const auto& played = policy.arms()[0];
    CHECK(played.mu_tilde == doctest::Approx(0.9 * 0.3 + 0.5));  // 0.77
    CHECK(played.n_disc == doctest::Approx(1.0));
    CHECK(played.mu_hat == doctest::Approx(0.77));

    // Indicator is zero for the unplayed arm: prior retained, tau follows the
    // cap schedule evaluated at t = 1.
    const auto& idle = policy.arms()[1];
    CHECK(idle.mu_tilde == 0.0);
    CHECK(idle.n_disc == 0.0);
    CHECK(idle.mu_hat == 0.0);
    CHECK(idle.tau == doctest::Approx(std::min(cfg.slope * 1 + 0.05, cfg.tau_max_bound)));

    CHECK(policy.round() == 2);
}

TEST_CASE("undiscounted updates count plays exactly") {
    auto cfg = default_policy_config(2, 0);
    cfg.gamma = 1.0;
    GaussianTsPolicy policy(cfg, 2);

    policy.update(0, 0.0);
    policy.update(0, 0.0);

    const auto& arm = policy.arms()[0];
    CHECK(arm.n_disc == doctest::Approx(2.0));
    CHECK(arm.mu_tilde == doctest::Approx(0.3));  // unchanged from the prior
    const double tau_max = std::min(cfg.slope * 2 + 0.05, cfg.tau_max_bound);
    CHECK(arm.tau == doctest::Approx(std::min(1.0 / std::sqrt(2.0), tau_max)));
}

TEST_CASE("update rejects bad rewards and arms") {
    GaussianTsPolicy policy(default_policy_config(3, 0), 3);
    CHECK_THROWS_AS(policy.update(0, std::numeric_limits<double>::quiet_NaN()),
                    std::invalid_argument);
    CHECK_THROWS_AS(policy.update(0, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    CHECK_THROWS_AS(policy.update(3, 0.5), std::out_of_range);
    CHECK_THROWS_AS(policy.update(-1, 0.5), std::out_of_range);
}

TEST_CASE("optional reward clipping bounds the update") {
    auto cfg = default_policy_config(2, 0);
    cfg.clip_rewards = true;
    cfg.clip_lo = -1.0;
    cfg.clip_hi = 1.0;
    GaussianTsPolicy policy(cfg, 2);
    policy.update(1, 5.0);
    CHECK(policy.arms()[1].mu_tilde == doctest::Approx(1.0));
}

TEST_CASE("fixed policy always returns the primary arm") {
    FixedArmPolicy policy(6, 0);
    RandomStream rng(5);
    for (int round = 0; round < 200; ++round) {
        const Decision d = policy.select(rng);
        CHECK(d.chosen_arm == 0);
        CHECK(d.sampled_indices.empty());
        policy.update(d.chosen_arm, 0.1);
    }
}

TEST_CASE("uniform policy hits every arm with frequency 1/K") {
    UniformRandomPolicy policy(6);
    RandomStream rng(13);
    std::vector<int> counts(6, 0);
    const int draws = 60000;
    for (int i = 0; i < draws; ++i) ++counts[policy.select(rng).chosen_arm];
    for (int a = 0; a < 6; ++a) {
        CHECK(static_cast<double>(counts[a]) / draws ==
              doctest::Approx(1.0 / 6).epsilon(0.06));
    }
}

TEST_CASE("uniform policy with one arm always returns it") {
    UniformRandomPolicy policy(1);
    RandomStream rng(1);
    for (int i = 0; i < 100; ++i) CHECK(policy.select(rng).chosen_arm == 0);
}

TEST_CASE("stationary-ts is the gamma=1 slope=0 reduction of discounted-ts") {
    auto cfg = default_policy_config(3, 0);
    Policy stationary = make_policy(PolicyKind::stationary_ts, cfg, 3);

    auto reduced_cfg = cfg;
    reduced_cfg.gamma = 1.0;
    reduced_cfg.slope = 0.0;
    Policy reduced = make_policy(PolicyKind::discounted_ts, reduced_cfg, 3);

    RandomStream rng_a(99), rng_b(99), rewards(100);
    for (int round = 0; round < 200; ++round) {
        const Decision da = stationary.select(rng_a);
        const Decision db = reduced.select(rng_b);
        REQUIRE(da.chosen_arm == db.chosen_arm);
        CHECK(da.sampled_indices == db.sampled_indices);
        const double r = rewards.normal(0.2, 0.3);
        stationary.update(da.chosen_arm, r);
        reduced.update(db.chosen_arm, r);
    }
    CHECK(stationary.arms() == reduced.arms());
}

TEST_CASE("stationary-ts locks onto the best arm of a stationary pair") {
    // Long-run Monte Carlo: means 0.8 vs 0.2 with noise 0.1 over 2000
    // rounds; the last 500 rounds should almost always play arm 0.
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        auto cfg = default_policy_config(2, 0);
        Policy policy = make_policy(PolicyKind::stationary_ts, cfg, 2);
        RandomStream policy_rng = RandomStream::derive(seed, 0);
        RandomStream env_rng = RandomStream::derive(seed, 1);

        int late_best = 0;
        for (int round = 1; round <= 2000; ++round) {
            const Decision d = policy.select(policy_rng);
            const double mean = d.chosen_arm == 0 ? 0.8 : 0.2;
            policy.update(d.chosen_arm, env_rng.normal(mean, 0.1));
            if (round > 1500 && d.chosen_arm == 0) ++late_best;
        }
        CHECK(late_best / 500.0 > 0.9);
    }
}

TEST_CASE("first stationary-ts round matches a fresh sample_and_select") {
    const auto cfg = default_policy_config(4, 0);
    Policy stationary = make_policy(PolicyKind::stationary_ts, cfg, 4);
    GaussianTsPolicy fresh(cfg, 4);
    RandomStream rng_a(31), rng_b(31);
    const Decision da = stationary.select(rng_a);
    const Decision db = fresh.select(rng_b);
    CHECK(da.chosen_arm == db.chosen_arm);
    CHECK(da.sampled_indices == db.sampled_indices);
}

// Property: with gamma < 1 and rewards in [-1, 1] the discounted statistics
// stay inside their geometric-series bounds.
TEST_CASE("discounted statistics are bounded for rewards in [-1, 1]") {
    auto cfg = default_policy_config(4, 0);
    const double gamma = cfg.gamma;
    GaussianTsPolicy policy(cfg, 4);
    RandomStream rng(17);

    const double n_bound = 1.0 / (1.0 - gamma) + 1e-9;
    for (int round = 0; round < 2000; ++round) {
        const int arm = rng.uniform_int(4);
        const double reward = 2.0 * rng.uniform01() - 1.0;
        policy.update(arm, reward);
        for (int i = 0; i < 4; ++i) {
            const auto& a = policy.arms()[i];
            CHECK(a.n_disc >= 0.0);
            CHECK(a.n_disc <= n_bound);
            CHECK(std::abs(a.mu_tilde) <=
                  std::abs(cfg.prior_mu_tilde[i]) + 1.0 / (1.0 - gamma) + 1e-9);
        }
    }
}

// Property: tau always respects the growth-capped schedule; never-played arms
// carry tau = tau_max exactly; played arms shrink at least as fast as
// 1/sqrt(gamma * n + 1).
TEST_CASE("variance schedule invariants hold along random trajectories") {
    auto cfg = default_policy_config(5, 0);
    cfg.slope = 0.01;  // exercise cap growth within a short run
    GaussianTsPolicy policy(cfg, 5);
    RandomStream rng(23);

    std::vector<bool> ever_played(5, false);
    for (int round = 1; round <= 300; ++round) {
        const int arm = rng.uniform_int(5);
        const auto before = policy.arms();
        policy.update(arm, rng.normal(0.0, 0.5));
        ever_played[arm] = true;

        for (int i = 0; i < 5; ++i) {
            const auto& a = policy.arms()[i];
            const double tau_max = std::min(cfg.slope * round + cfg.tau_init[i],
                                            cfg.tau_max_bound);
            CHECK(a.tau > 0.0);
            CHECK(a.tau <= tau_max + 1e-12);
            if (!ever_played[i]) CHECK(a.tau == tau_max);
            if (i == arm && before[i].n_disc > 0.0) {
                CHECK(a.tau <= 1.0 / std::sqrt(cfg.gamma * before[i].n_disc + 1.0) + 1e-12);
            }
        }
    }
}

// Property: shifting every prior mean by a constant (and rewards with it)
// shifts the sampled indices uniformly and leaves the chosen sequence
// unchanged under the same seed.
TEST_CASE("argmax is invariant to a common shift of the means") {
    const double shift = 5.0;
    auto cfg_a = default_policy_config(4, 0);
    auto cfg_b = cfg_a;
    for (double& m : cfg_b.prior_mu_hat) m += shift;

    GaussianTsPolicy a(cfg_a, 4), b(cfg_b, 4);
    RandomStream rng_a(77), rng_b(77), rewards(78);
    for (int round = 0; round < 100; ++round) {
        const Decision da = a.select(rng_a);
        const Decision db = b.select(rng_b);
        REQUIRE(da.chosen_arm == db.chosen_arm);
        for (std::size_t i = 0; i < da.sampled_indices.size(); ++i) {
            CHECK(db.sampled_indices[i] - da.sampled_indices[i] ==
                  doctest::Approx(shift).epsilon(1e-9));
        }
        const double r = rewards.normal(0.1, 0.2);
        a.update(da.chosen_arm, r);
        b.update(db.chosen_arm, r + shift);
    }
}
