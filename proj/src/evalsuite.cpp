#include "udrlpg/evalsuite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace udrlpg {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> average_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;  // average rank, 1-based
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("spearman: need two equal-length series");
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;  // all-ties convention
    return sxy / std::sqrt(sxx * syy);
}

std::string IdentityCurve::to_csv() const {
    std::ostringstream out;
    out << "command,achieved,is_extrapolation\n";
    for (std::size_t i = 0; i < commands.size(); ++i)
        out << fmt(commands[i]) << ',' << fmt(achieved[i]) << ",0\n";
    out << fmt(extrapolation_command) << ',' << fmt(extrapolation_achieved) << ",1\n";
    out << "# spearman_rho," << fmt(spearman_rho) << ",\n";
    return out.str();
}

IdentityCurve identity_curve(const Checkpoint& ckpt, int n_commands, int episodes,
                             std::uint64_t seed) {
    if (n_commands < 2) throw std::invalid_argument("identity_curve: n_commands >= 2");
    const double r_min = ckpt.generator.command_norm.r_min;
    const double r_max = ckpt.generator.command_norm.r_max;

    IdentityCurve curve;
    for (int i = 0; i < n_commands; ++i) {
        const double c =
            r_min + (r_max - r_min) * static_cast<double>(i) / (n_commands - 1);
        curve.commands.push_back(c);
        curve.achieved.push_back(evaluate(ckpt, c, episodes, derive_seed(seed, 0xD0, i))
                                     .mean_return);
    }
    curve.spearman_rho = spearman(curve.commands, curve.achieved);
    curve.extrapolation_command = 1.1 * r_max;
    curve.extrapolation_achieved =
        evaluate(ckpt, curve.extrapolation_command, episodes, derive_seed(seed, 0xD1))
            .mean_return;
    return curve;
}

DispersionStats dispersion(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("dispersion: empty");
    DispersionStats s;
    s.values = values;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = values.size() > 1
                   ? std::sqrt(ss / static_cast<double>(values.size() - 1))
                   : 0.0;
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    return s;
}

std::string VarianceReport::to_csv() const {
    std::ostringstream out;
    out << "config,mean,stddev,min,max,finals\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out << labels[i] << ',' << fmt(stats[i].mean) << ',' << fmt(stats[i].stddev) << ','
            << fmt(stats[i].min) << ',' << fmt(stats[i].max) << ',';
        for (std::size_t k = 0; k < stats[i].values.size(); ++k)
            out << (k ? ";" : "") << fmt(stats[i].values[k]);
        out << "\n";
    }
    return out.str();
}

VarianceReport final_variance(const std::vector<RunConfig>& configs,
                              const std::vector<std::uint64_t>& seeds) {
    if (seeds.size() < 3) throw std::invalid_argument("final_variance: need >= 3 seeds");
    VarianceReport report;
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        std::vector<std::future<double>> futs;
        for (std::uint64_t s : seeds) {
            RunConfig cfg = configs[ci];
            cfg.seed = s;
            cfg.out_dir += "/variance_c" + std::to_string(ci) + "_s" + std::to_string(s);
            futs.push_back(std::async(std::launch::async, [cfg] {
                const TrainResult res = train(cfg);
                // final performance = evaluation at the top command, noise-free;
                // the last rollout stage mixes deliberately low commands
                return evaluate(res.checkpoint, res.checkpoint.generator.command_norm.r_max,
                                10, cfg.seed)
                    .mean_return;
            }));
        }
        std::vector<double> finals;
        for (auto& f : futs) finals.push_back(f.get());
        report.labels.push_back(configs[ci].env + "/" + strategy_name(configs[ci].strategy) +
                                "/c" + std::to_string(ci));
        report.stats.push_back(dispersion(finals));
    }
    return report;
}

std::string AblationReport::StrategyResult::curve_csv() const {
    std::ostringstream out;
    out << "stage";
    for (std::size_t s = 0; s < logs.size(); ++s) out << ",seed" << s << "_mean_return";
    out << ",mean,stddev\n";
    const std::size_t n_stages = logs.empty() ? 0 : logs.front().records.size();
    for (std::size_t t = 0; t < n_stages; ++t) {
        out << logs.front().records[t].stage;
        std::vector<double> row;
        for (const RunLog& log : logs) {
            row.push_back(log.records[t].mean_return);
            out << ',' << fmt(row.back());
        }
        const DispersionStats d = dispersion(row);
        out << ',' << fmt(d.mean) << ',' << fmt(d.stddev) << "\n";
    }
    return out.str();
}

std::string AblationReport::summary_csv() const {
    std::ostringstream out;
    out << "strategy,final_mean,final_stddev,final_min,final_max,finals\n";
    for (const StrategyResult& s : strategies) {
        out << strategy_name(s.strategy) << ',' << fmt(s.finals.mean) << ','
            << fmt(s.finals.stddev) << ',' << fmt(s.finals.min) << ',' << fmt(s.finals.max)
            << ',';
        for (std::size_t k = 0; k < s.finals.values.size(); ++k)
            out << (k ? ";" : "") << fmt(s.finals.values[k]);
        out << "\n";
    }
    return out.str();
}

AblationReport ablation(const RunConfig& base, const std::vector<std::uint64_t>& seeds,
                        bool write_outputs) {
    if (seeds.size() < 3) throw std::invalid_argument("ablation: need >= 3 seeds");
    const BufferStrategy all[] = {BufferStrategy::buckets_weighted,
                                  BufferStrategy::buckets_uniform,
                                  BufferStrategy::flat_weighted,
                                  BufferStrategy::flat_uniform};
    AblationReport report;
    for (BufferStrategy strat : all) {
        AblationReport::StrategyResult sr;
        sr.strategy = strat;
        try {
            std::vector<std::future<std::pair<RunLog, double>>> futs;
            for (std::uint64_t s : seeds) {
                RunConfig cfg = base;
                cfg.strategy = strat;
                cfg.seed = s;
                cfg.out_dir =
                    base.out_dir + "/ablation_" + strategy_name(strat) + "_s" + std::to_string(s);
                futs.push_back(std::async(std::launch::async, [cfg] {
                    const TrainResult res = train(cfg);
                    const double fin =
                        evaluate(res.checkpoint, res.checkpoint.generator.command_norm.r_max,
                                 10, cfg.seed)
                            .mean_return;
                    return std::make_pair(res.log, fin);
                }));
            }
            std::vector<double> finals;
            for (auto& f : futs) {
                auto [log, fin] = f.get();
                sr.logs.push_back(std::move(log));
                finals.push_back(fin);
            }
            sr.finals = dispersion(finals);
        } catch (const std::exception& e) {
            std::cerr << "ablation: strategy " << strategy_name(strat) << " failed: "
                      << e.what() << "\n";
            continue;  // keep going with the remaining strategies
        }
        report.strategies.push_back(std::move(sr));
    }
    if (write_outputs) {
        const std::filesystem::path dir(base.out_dir);
        std::filesystem::create_directories(dir);
        for (const auto& sr : report.strategies)
            write_file(dir / ("ablation_" + strategy_name(sr.strategy) + ".csv"),
                       sr.curve_csv());
        write_file(dir / "ablation_summary.csv", report.summary_csv());
    }
    return report;
}

}  // namespace udrlpg
