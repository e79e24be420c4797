#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "udrlpg/evalsuite.hpp"

using namespace udrlpg;

namespace {

// brute-force rank-pair oracle: ranks by counting smaller/equal elements,
// then Pearson on the ranks
double spearman_oracle(const std::vector<double>& x, const std::vector<double>& y) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            int smaller = 0, equal = 0;
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (v[j] < v[i]) ++smaller;
                if (v[j] == v[i]) ++equal;
            }
            r[i] = smaller + 1 + (equal - 1) * 0.5;
        }
        return r;
    };
    const std::vector<double> rx = ranks(x), ry = ranks(y);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= rx.size();
    my /= ry.size();
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

RunConfig tiny_bandit_config(std::uint64_t seed) {
    RunConfig cfg;
    cfg.env = "bimodal-bandit";
    cfg.seed = seed;
    cfg.policy_hidden = {8};
    cfg.generator_hidden = {16, 16};
    cfg.n_init_random = 10;
    cfg.updates_per_stage = 10;
    cfg.batch_size = 8;
    cfg.rollouts_per_stage = 4;
    cfg.total_stages = 5;
    cfg.n_workers = 1;
    cfg.out_dir = "/tmp/udrlpg_evalsuite_test";
    return cfg;
}

// checkpoint whose generator decodes a two-layer (no hidden) bandit policy
Checkpoint bandit_checkpoint(std::uint64_t seed) {
    Checkpoint c;
    c.env_name = "bimodal-bandit";
    c.policy_spec = NetSpec{{1, 1}, Activation::tanh, Activation::tanh};
    c.action_low = {-1.0};
    c.action_high = {1.0};
    c.norm = RunningNorm(1);
    c.generator = make_generator(param_count(c.policy_spec), {0.0, 10.0}, 0.0, seed, 1e-2,
                                 {16, 16});
    c.config = tiny_bandit_config(seed);
    return c;
}

}  // namespace

TEST_CASE("spearman agrees with the brute-force oracle on random inputs") {
    Rng rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> coarse(0, 4);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + trial % 12;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            // coarse values produce plenty of ties
            x[i] = trial % 2 ? u(rng) : coarse(rng);
            y[i] = trial % 3 ? u(rng) : coarse(rng);
        }
        CHECK(spearman(x, y) == doctest::Approx(spearman_oracle(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("spearman conventions") {
    CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{5, 5, 5}) == 0.0);
    CHECK(spearman(std::vector<double>{0, 10}, std::vector<double>{0.1, 9.8}) ==
          doctest::Approx(1.0));
    CHECK(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{8, 6, 4, 2}) ==
          doctest::Approx(-1.0));
}

TEST_CASE("dispersion of duplicated values has zero spread") {
    const DispersionStats s = dispersion({4.2, 4.2, 4.2});
    CHECK(s.mean == doctest::Approx(4.2));
    CHECK(s.stddev == 0.0);
    CHECK(s.min == s.max);
}

TEST_CASE("identity curve of a constant generator reports rho 0") {
    Checkpoint c = bandit_checkpoint(3);
    // zero every generator weight: decode ignores the command entirely
    for (double& v : c.generator.rho.values) v = 0.0;
    const IdentityCurve curve = identity_curve(c, 5, 3, 42);
    for (std::size_t i = 1; i < curve.achieved.size(); ++i)
        CHECK(curve.achieved[i] == curve.achieved[0]);
    CHECK(curve.spearman_rho == 0.0);
    CHECK(curve.extrapolation_command == doctest::Approx(11.0));
}

TEST_CASE("identity curve does not mutate the checkpoint") {
    Checkpoint c = bandit_checkpoint(4);
    const std::vector<double> before = c.generator.rho.values;
    const std::size_t norm_count = c.norm.count;
    identity_curve(c, 4, 2, 1);
    CHECK(c.generator.rho.values == before);
    CHECK(c.norm.count == norm_count);
}

TEST_CASE("calibrated two-point generator yields a perfect identity curve on the bandit") {
    Checkpoint c = bandit_checkpoint(5);
    // policy [w, b]: action = tanh(w * obs + b) with obs = 1 (norm is identity
    // while count < 2). Targets: return 0 at action 0, return 10 at action 0.5.
    const std::vector<double> theta_zero = {0.0, 0.0};
    const std::vector<double> theta_good = {0.0, std::atanh(0.5)};
    const std::vector<std::pair<double, std::vector<double>>> batch = {{0.0, theta_zero},
                                                                       {10.0, theta_good}};
    for (int i = 0; i < 6000; ++i) train_batch(c.generator, batch);

    const IdentityCurve curve = identity_curve(c, 2, 3, 7);
    CHECK(curve.commands[0] == doctest::Approx(0.0));
    CHECK(curve.commands[1] == doctest::Approx(10.0));
    CHECK(curve.achieved[0] == doctest::Approx(0.0).epsilon(0.2));
    CHECK(curve.achieved[1] == doctest::Approx(10.0).epsilon(0.05));
    CHECK(curve.spearman_rho == doctest::Approx(1.0));
}

TEST_CASE("ablation runs all four strategies with identical shapes") {
    const RunConfig base = tiny_bandit_config(1);
    const AblationReport report = ablation(base, {1, 2, 3}, /*write_outputs=*/false);
    REQUIRE(report.strategies.size() == 4);
    for (const auto& sr : report.strategies) {
        REQUIRE(sr.logs.size() == 3);
        for (const RunLog& log : sr.logs)
            CHECK(log.records.size() == static_cast<std::size_t>(base.total_stages));
    }
}

TEST_CASE("ablation summary reproduces the per-seed finals it reports") {
    const RunConfig base = tiny_bandit_config(2);
    const AblationReport report = ablation(base, {4, 5, 6}, false);
    const std::string summary = report.summary_csv();
    for (const auto& sr : report.strategies) {
        REQUIRE(sr.finals.values.size() == 3);
        double mean = 0.0;
        for (double v : sr.finals.values) {
            mean += v;
            CHECK((v >= 0.0 && v <= 10.0));  // bandit return range
        }
        mean /= 3.0;
        CHECK(sr.finals.mean == doctest::Approx(mean).epsilon(1e-12));
        CHECK(summary.find(strategy_name(sr.strategy)) != std::string::npos);
    }
}

TEST_CASE("final_variance with duplicated seeds still reports honest dispersion") {
    const RunConfig base = tiny_bandit_config(3);
    const VarianceReport report = final_variance({base}, {7, 7, 7});
    REQUIRE(report.stats.size() == 1);
    CHECK(report.stats[0].stddev == 0.0);  // identical seeds, identical runs
    CHECK_THROWS(final_variance({base}, {1, 2}));
}
