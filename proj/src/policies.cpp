#include "aigc/policies.hpp"

#include <stdexcept>

namespace aigc {

std::string_view to_string(PolicyKind k)
{
    switch (k) {
    case PolicyKind::Random: return "random";
    case PolicyKind::RoundRobin: return "round_robin";
    case PolicyKind::OverloadAvoid: return "overload_avoid";
    case PolicyKind::GreedyOracle: return "greedy_oracle";
    case PolicyKind::Sac: return "sac";
    }
    return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name)
{
    for (auto k : {PolicyKind::Random, PolicyKind::RoundRobin, PolicyKind::OverloadAvoid, PolicyKind::GreedyOracle,
                   PolicyKind::Sac})
        if (to_string(k) == name) return k;
    throw std::invalid_argument("unknown policy: " + std::string(name));
}

int random_select(int n_asps, std::mt19937_64& rng)
{
    if (n_asps < 1) throw std::invalid_argument("random_select: no ASPs");
    return std::uniform_int_distribution<int>(0, n_asps - 1)(rng);
}

int round_robin_select(int n_asps, std::uint64_t& counter)
{
    if (n_asps < 1) throw std::invalid_argument("round_robin_select: no ASPs");
    const int pick = static_cast<int>(counter % static_cast<std::uint64_t>(n_asps));
    ++counter;
    return pick;
}

int overload_avoid_select(std::span<const int> available)
{
    if (available.empty()) throw std::invalid_argument("overload_avoid_select: no ASPs");
    int best = 0;
    for (std::size_t i = 1; i < available.size(); ++i)
        if (available[i] > available[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    return best;
}

int greedy_upper_bound_select(std::span<const int> available, std::span<const AspQuality> qualities, int demand)
{
    if (available.size() != qualities.size())
        throw std::invalid_argument("greedy_upper_bound_select: quality table size mismatch");
    int best = -1;
    double best_q = 0.0;
    for (std::size_t i = 0; i < available.size(); ++i) {
        if (available[i] < demand) continue;
        const double q = qualities[i].score(demand);
        if (best < 0 || q > best_q) {
            best = static_cast<int>(i);
            best_q = q;
        }
    }
    return best >= 0 ? best : overload_avoid_select(available);
}

RandomPolicy::RandomPolicy(std::uint64_t seed) : seed_(seed), rng_(make_rng(seed, RngStream::Policy)) {}

int RandomPolicy::select(const Observation& obs)
{
    return random_select(static_cast<int>(obs.available.size()), rng_);
}

void RandomPolicy::reset()
{
    rng_ = make_rng(seed_, RngStream::Policy);
}

int RoundRobinPolicy::select(const Observation& obs)
{
    return round_robin_select(static_cast<int>(obs.available.size()), counter_);
}

GreedyOraclePolicy::GreedyOraclePolicy(std::vector<AspQuality> qualities) : qualities_(std::move(qualities)) {}

int GreedyOraclePolicy::select(const Observation& obs)
{
    return greedy_upper_bound_select(obs.available, qualities_, obs.demand);
}

std::vector<AspQuality> quality_table(const std::vector<AspSpec>& asps)
{
    std::vector<AspQuality> out;
    out.reserve(asps.size());
    for (const auto& a : asps) out.push_back(a.quality);
    return out;
}

std::unique_ptr<Policy> make_baseline(PolicyKind kind, std::uint64_t seed, const std::vector<AspSpec>& asps)
{
    switch (kind) {
    case PolicyKind::Random: return std::make_unique<RandomPolicy>(seed);
    case PolicyKind::RoundRobin: return std::make_unique<RoundRobinPolicy>();
    case PolicyKind::OverloadAvoid: return std::make_unique<OverloadAvoidPolicy>();
    case PolicyKind::GreedyOracle: return std::make_unique<GreedyOraclePolicy>(quality_table(asps));
    case PolicyKind::Sac: break;
    }
    throw std::invalid_argument("make_baseline: sac is a learned policy, not a baseline");
}

}  // namespace aigc
