#pragma once

// Experiment harness: identity curves, final-return dispersion across seeds,
// and the four-way buffer-strategy ablation. All reports are CSV-backed.

#include <span>
#include <string>
#include <vector>

#include "udrlpg/trainer.hpp"

namespace udrlpg {

// Spearman rank correlation with average ranks for ties; 0 when either side
// has no rank variance (the all-ties convention for degenerate generators).
double spearman(std::span<const double> x, std::span<const double> y);

struct IdentityCurve {
    std::vector<double> commands;  // ascending, even over the return range
    std::vector<double> achieved;  // mean return over `episodes` rollouts each
    double spearman_rho = 0.0;
    double extrapolation_command = 0.0;  // 1.1 * r_max probe, reported separately
    double extrapolation_achieved = 0.0;

    std::string to_csv() const;
};

IdentityCurve identity_curve(const Checkpoint& ckpt, int n_commands, int episodes,
                             std::uint64_t seed);

struct DispersionStats {
    double mean = 0.0, stddev = 0.0, min = 0.0, max = 0.0;
    std::vector<double> values;
};

DispersionStats dispersion(const std::vector<double>& values);

struct VarianceReport {
    std::vector<std::string> labels;
    // dispersion of each config's final performance across seeds, where final
    // performance is the trained checkpoint evaluated at the top command
    // (10 episodes, no exploration noise)
    std::vector<DispersionStats> stats;
    std::string to_csv() const;
};

// Runs every (config, seed) pair to completion; >= 3 seeds required.
VarianceReport final_variance(const std::vector<RunConfig>& configs,
                              const std::vector<std::uint64_t>& seeds);

struct AblationReport {
    struct StrategyResult {
        BufferStrategy strategy = BufferStrategy::buckets_weighted;
        std::vector<RunLog> logs;  // one per seed
        DispersionStats finals;    // per-seed evaluation at the top command
        std::string curve_csv() const;  // stage, per-seed mean returns, mean, stddev
    };
    std::vector<StrategyResult> strategies;
    std::string summary_csv() const;
};

// Identical configs across the four strategies, same seeds, >= 3 seeds.
// Writes per-strategy curve CSVs and a summary under base.out_dir when
// write_outputs is set. A failed strategy run is reported and skipped.
AblationReport ablation(const RunConfig& base, const std::vector<std::uint64_t>& seeds,
                        bool write_outputs = true);

}  // namespace udrlpg
