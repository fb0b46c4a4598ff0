#pragma once

#include "aigc/edge_env.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aigc {

enum class PolicyKind { Random, RoundRobin, OverloadAvoid, GreedyOracle, Sac };

std::string_view to_string(PolicyKind k);
PolicyKind parse_policy_kind(std::string_view name);

int random_select(int n_asps, std::mt19937_64& rng);

/// counter mod n_asps, then advances the counter.
int round_robin_select(int n_asps, std::uint64_t& counter);

/// Most available capacity, lowest index on ties.
int overload_avoid_select(std::span<const int> available);

/// Highest-quality ASP among those that can hold `demand`; falls back to
/// overload_avoid_select when none can.
int greedy_upper_bound_select(std::span<const int> available, std::span<const AspQuality> qualities, int demand);

class Policy {
public:
    virtual ~Policy() = default;
    virtual int select(const Observation& obs) = 0;
    // Called at the start of every episode.
    virtual void reset() {}
    virtual std::string name() const = 0;
};

class RandomPolicy final : public Policy {
public:
    explicit RandomPolicy(std::uint64_t seed);
    int select(const Observation& obs) override;
    void reset() override;
    std::string name() const override { return "random"; }

private:
    std::uint64_t seed_;
    std::mt19937_64 rng_;
};

class RoundRobinPolicy final : public Policy {
public:
    int select(const Observation& obs) override;
    void reset() override { counter_ = 0; }
    std::string name() const override { return "round_robin"; }

private:
    std::uint64_t counter_ = 0;
};

class OverloadAvoidPolicy final : public Policy {
public:
    int select(const Observation& obs) override { return overload_avoid_select(obs.available); }
    std::string name() const override { return "overload_avoid"; }
};

// The only policy handed the latent quality table.
class GreedyOraclePolicy final : public Policy {
public:
    explicit GreedyOraclePolicy(std::vector<AspQuality> qualities);
    int select(const Observation& obs) override;
    std::string name() const override { return "greedy_oracle"; }

private:
    std::vector<AspQuality> qualities_;
};

std::vector<AspQuality> quality_table(const std::vector<AspSpec>& asps);

/// Builds any baseline by kind. The quality table is only consulted for
/// GreedyOracle; Sac is not a baseline and throws.
std::unique_ptr<Policy> make_baseline(PolicyKind kind, std::uint64_t seed, const std::vector<AspSpec>& asps);

}  // namespace aigc
