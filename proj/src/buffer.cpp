#include "udrlpg/buffer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace udrlpg {

std::string strategy_name(BufferStrategy s) {
    switch (s) {
        case BufferStrategy::buckets_weighted: return "buckets_weighted";
        case BufferStrategy::buckets_uniform: return "buckets_uniform";
        case BufferStrategy::flat_weighted: return "flat_weighted";
        case BufferStrategy::flat_uniform: return "flat_uniform";
    }
    throw std::logic_error("unknown strategy");
}

BufferStrategy strategy_from_name(const std::string& name) {
    if (name == "buckets_weighted") return BufferStrategy::buckets_weighted;
    if (name == "buckets_uniform") return BufferStrategy::buckets_uniform;
    if (name == "flat_weighted") return BufferStrategy::flat_weighted;
    if (name == "flat_uniform") return BufferStrategy::flat_uniform;
    throw std::invalid_argument("unknown buffer strategy: " + name);
}

BucketedBuffer::BucketedBuffer(double r_min, double r_max, int n_buckets,
                               int capacity_per_bucket, BufferStrategy strategy)
    : r_min_(r_min), r_max_(r_max), capacity_per_bucket_(capacity_per_bucket),
      strategy_(strategy), buckets_(n_buckets) {
    if (!(r_min < r_max)) throw std::invalid_argument("buffer: empty return range");
    if (n_buckets < 1 || capacity_per_bucket < 1)
        throw std::invalid_argument("buffer: geometry must be positive");
}

int BucketedBuffer::bucket_index(double return_value) const {
    const double r = std::clamp(return_value, r_min_, r_max_);
    const double width = (r_max_ - r_min_) / static_cast<double>(buckets_.size());
    const int idx = static_cast<int>(std::floor((r - r_min_) / width));
    return std::min(idx, static_cast<int>(buckets_.size()) - 1);  // top closure
}

void BucketedBuffer::insert(BufferEntry entry) {
    if (entry.observed_return < r_min_ || entry.observed_return > r_max_) {
        clamped_inserts_ += 1;
        entry.observed_return = std::clamp(entry.observed_return, r_min_, r_max_);
    }
    std::deque<BufferEntry>& bucket = buckets_[bucket_index(entry.observed_return)];
    if (static_cast<int>(bucket.size()) == capacity_per_bucket_) bucket.pop_front();
    bucket.push_back(std::move(entry));
}

std::size_t BucketedBuffer::size() const {
    std::size_t n = 0;
    for (const auto& b : buckets_) n += b.size();
    return n;
}

double BucketedBuffer::max_return() const {
    if (empty()) throw std::runtime_error("buffer empty: rollout stage must run first");
    for (auto it = buckets_.rbegin(); it != buckets_.rend(); ++it) {
        if (it->empty()) continue;
        double best = it->front().observed_return;
        for (const BufferEntry& e : *it) best = std::max(best, e.observed_return);
        return best;
    }
    throw std::logic_error("unreachable");
}

std::vector<std::size_t> BucketedBuffer::occupancy() const {
    std::vector<std::size_t> occ(buckets_.size());
    for (std::size_t b = 0; b < buckets_.size(); ++b) occ[b] = buckets_[b].size();
    return occ;
}

std::vector<double> BucketedBuffer::bucket_probabilities() const {
    std::vector<double> p(buckets_.size(), 0.0);
    std::vector<int> nonempty;
    for (int b = 0; b < n_buckets(); ++b)
        if (!buckets_[b].empty()) nonempty.push_back(b);
    if (nonempty.empty()) return p;

    switch (strategy_) {
        case BufferStrategy::buckets_weighted: {
            double total = 0.0;
            for (std::size_t rank = 0; rank < nonempty.size(); ++rank)
                total += 1.0 + static_cast<double>(rank);
            for (std::size_t rank = 0; rank < nonempty.size(); ++rank)
                p[nonempty[rank]] = (1.0 + static_cast<double>(rank)) / total;
            break;
        }
        case BufferStrategy::buckets_uniform: {
            for (int b : nonempty) p[b] = 1.0 / static_cast<double>(nonempty.size());
            break;
        }
        case BufferStrategy::flat_uniform: {
            const double total = static_cast<double>(size());
            for (int b : nonempty) p[b] = static_cast<double>(buckets_[b].size()) / total;
            break;
        }
        case BufferStrategy::flat_weighted: {
            double total = 0.0;
            for (const auto& bucket : buckets_)
                for (const BufferEntry& e : bucket)
                    total += 1.0 + (e.observed_return - r_min_) / (r_max_ - r_min_);
            for (int b : nonempty)
                for (const BufferEntry& e : buckets_[b])
                    p[b] += (1.0 + (e.observed_return - r_min_) / (r_max_ - r_min_)) / total;
            break;
        }
    }
    return p;
}

const BufferEntry& BucketedBuffer::draw(Rng& rng) const {
    if (empty()) throw std::runtime_error("buffer empty: rollout stage must run first");

    switch (strategy_) {
        case BufferStrategy::buckets_weighted:
        case BufferStrategy::buckets_uniform: {
            std::vector<int> nonempty;
            for (int b = 0; b < n_buckets(); ++b)
                if (!buckets_[b].empty()) nonempty.push_back(b);
            std::vector<double> w(nonempty.size());
            for (std::size_t rank = 0; rank < nonempty.size(); ++rank)
                w[rank] = strategy_ == BufferStrategy::buckets_weighted
                              ? 1.0 + static_cast<double>(rank)
                              : 1.0;
            std::discrete_distribution<int> pick_bucket(w.begin(), w.end());
            const std::deque<BufferEntry>& bucket = buckets_[nonempty[pick_bucket(rng)]];
            std::uniform_int_distribution<std::size_t> pick(0, bucket.size() - 1);
            return bucket[pick(rng)];
        }
        case BufferStrategy::flat_uniform: {
            std::uniform_int_distribution<std::size_t> pick(0, size() - 1);
            std::size_t i = pick(rng);
            for (const auto& bucket : buckets_) {
                if (i < bucket.size()) return bucket[i];
                i -= bucket.size();
            }
            throw std::logic_error("unreachable");
        }
        case BufferStrategy::flat_weighted: {
            std::vector<double> w;
            w.reserve(size());
            for (const auto& bucket : buckets_)
                for (const BufferEntry& e : bucket)
                    w.push_back(1.0 + (e.observed_return - r_min_) / (r_max_ - r_min_));
            std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
            std::size_t i = pick(rng);
            for (const auto& bucket : buckets_) {
                if (i < bucket.size()) return bucket[i];
                i -= bucket.size();
            }
            throw std::logic_error("unreachable");
        }
    }
    throw std::logic_error("unknown strategy");
}

std::vector<std::pair<double, std::vector<double>>> BucketedBuffer::sample(int batch_size,
                                                                           Rng& rng) const {
    std::vector<std::pair<double, std::vector<double>>> out;
    out.reserve(batch_size);
    for (int i = 0; i < batch_size; ++i) {
        const BufferEntry& e = draw(rng);
        out.emplace_back(e.observed_return, e.theta);
    }
    return out;
}

std::vector<double> BucketedBuffer::select_commands(int k, Rng& rng) const {
    const double best = max_return();
    const double probe = std::min(1.1 * best, 1.1 * r_max_);
    double lo = 0.8 * best;
    double hi = probe;
    if (lo > hi) std::swap(lo, hi);  // best < 0 inverts the window

    std::vector<double> commands;
    commands.reserve(k);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (int i = 0; i + 1 < k; ++i) commands.push_back(dist(rng));
    commands.push_back(probe);  // explicit extrapolation probe
    return commands;
}

void BucketedBuffer::init_random(int n, const NetSpec& policy_spec, Env& env,
                                 RunningNorm& norm, std::uint64_t seed) {
    const EnvContract& c = env.contract();
    for (int i = 0; i < n; ++i) {
        Policy p = random_policy(policy_spec, c.action_low, c.action_high,
                                 derive_seed(seed, 0xF01, i));
        const EpisodeResult r = rollout(env, p, norm, derive_seed(seed, 0xF02, i));
        insert({.observed_return = r.episode_return,
                .theta = std::move(p.params.values),
                .birth_iteration = 0});
    }
}

std::string BucketedBuffer::dump_csv() const {
    std::ostringstream out;
    out << "observed_return,birth_iteration,theta0,theta1,theta2,theta3,theta_hash\n";
    char buf[64];
    for (const auto& bucket : buckets_) {
        for (const BufferEntry& e : bucket) {
            std::uint64_t h = 14695981039346656037ULL;  // FNV-1a over raw bytes
            for (double v : e.theta) {
                std::uint64_t bits;
                static_assert(sizeof(bits) == sizeof(v));
                std::memcpy(&bits, &v, sizeof(bits));
                for (int byte = 0; byte < 8; ++byte) {
                    h ^= (bits >> (8 * byte)) & 0xFF;
                    h *= 1099511628211ULL;
                }
            }
            out << e.observed_return << ',' << e.birth_iteration;
            for (std::size_t i = 0; i < 4; ++i) {
                std::snprintf(buf, sizeof(buf), "%.17g", i < e.theta.size() ? e.theta[i] : 0.0);
                out << ',' << buf;
            }
            out << ',' << h << '\n';
        }
    }
    return out.str();
}

}  // namespace udrlpg
