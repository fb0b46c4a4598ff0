#pragma once

#include "aigc/edge_env.hpp"
#include "aigc/nn.hpp"
#include "aigc/policies.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <vector>

namespace aigc {

struct SacConfig {
    double gamma = 0.9;
    double tau = 0.005;
    double alpha = 0.05;
    bool auto_alpha = false;
    double target_entropy_ratio = 0.6;  // target entropy = ratio * ln(n_actions)
    int batch_size = 64;
    int buffer_capacity = 100000;
    double actor_lr = 1e-3;
    double critic_lr = 1e-3;
    double alpha_lr = 1e-3;
    double lr_final_ratio = 0.05;  // learning rates anneal linearly to ratio * initial over the episodes
    int update_every = 1;          // environment steps per gradient update
    int warmup_steps = 1000;
    int episodes = 150;
    std::vector<int> hidden{64, 64};
    double grad_clip = 10.0;
    std::uint64_t seed = 1;

    void validate() const;
};

struct Transition {
    StateVector state;
    int action = 0;
    double reward = 0.0;
    StateVector next_state;
    bool done = false;
};

// Column-major batch assembled from sampled transitions.
struct Batch {
    nn::Matrix states;
    std::vector<int> actions;
    nn::Vector rewards;
    nn::Matrix next_states;
    nn::Vector dones;

    static Batch from(const std::vector<const Transition*>& items);
    Eigen::Index size() const { return rewards.size(); }
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    /// Overwrites the oldest transition once full.
    void push(Transition t);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    /// i-th transition in insertion order among those retained (0 = oldest).
    const Transition& at(std::size_t i) const;
    /// Uniform with replacement. Throws std::logic_error when size() < batch_size.
    Batch sample(std::size_t batch_size, std::mt19937_64& rng) const;

private:
    std::size_t capacity_;
    std::size_t cursor_ = 0;
    std::vector<Transition> items_;
};

/// Maps [0,1] state features to [-1,1] before they reach any network. The
/// encoded state is all non-negative, which lets a ReLU unit's weights all
/// move the same way and die; centering avoids that.
nn::Matrix center_features(const nn::Matrix& states);

/// Soft Bellman targets with the exact expectation over the discrete action set:
/// y = r + gamma * (1 - done) * sum_a pi(a|s') * (min(Q1'(s',a), Q2'(s',a)) - alpha * log pi(a|s')).
nn::Vector critic_targets(const Batch& batch, const nn::Mlp& target_q1, const nn::Mlp& target_q2,
                          const nn::Mlp& actor, double alpha, double gamma);

struct ActorObjective {
    double loss = 0.0;            // mean over the batch
    double entropy = 0.0;         // mean policy entropy
    nn::Matrix logits_grad;       // d(loss)/d(logits)
};

/// Mean over states of sum_a pi(a|s) * (alpha * log pi(a|s) - min(Q1, Q2)(s,a)),
/// with the critic values held fixed.
ActorObjective actor_objective(const nn::Matrix& logits, const nn::Matrix& q1, const nn::Matrix& q2, double alpha);

struct LossReport {
    double critic1_loss = 0.0;
    double critic2_loss = 0.0;
    double actor_loss = 0.0;
    double entropy = 0.0;
    double alpha = 0.0;

    friend bool operator==(const LossReport&, const LossReport&) = default;
};

enum class ActMode { Sample, Greedy };

class SacAgent {
public:
    SacAgent(int state_dim, int n_actions, SacConfig config);

    int act(const StateVector& state, ActMode mode);
    nn::Vector probabilities(const StateVector& state) const;

    /// One critic step, one actor step, temperature step (if enabled) and
    /// Polyak target update on a batch sampled from `buffer`.
    LossReport update(const ReplayBuffer& buffer);
    LossReport update_on(const Batch& batch);

    /// Scales every optimizer's learning rate to `ratio` times its configured value.
    void set_learning_rate_scale(double ratio);

    double alpha() const { return alpha_; }
    int n_actions() const { return n_actions_; }
    int state_dim() const { return state_dim_; }
    const SacConfig& config() const { return config_; }

    nn::Mlp& actor() { return actor_; }
    nn::Mlp& q1() { return q1_; }
    nn::Mlp& q2() { return q2_; }
    nn::Mlp& target_q1() { return target_q1_; }
    nn::Mlp& target_q2() { return target_q2_; }
    const nn::Mlp& actor() const { return actor_; }
    const nn::Mlp& q1() const { return q1_; }
    const nn::Mlp& q2() const { return q2_; }
    const nn::Mlp& target_q1() const { return target_q1_; }
    const nn::Mlp& target_q2() const { return target_q2_; }

    /// actor.json, critic1.json, critic2.json in neural-core checkpoint format.
    void save(const std::filesystem::path& dir) const;
    /// Restores the actor (and critics when present) into an agent built for `config`.
    static SacAgent load(const std::filesystem::path& dir, SacConfig config);

private:
    double critic_step(nn::Mlp& net, nn::Adam& opt, const Batch& batch, const nn::Vector& targets);

    int state_dim_;
    int n_actions_;
    SacConfig config_;
    std::mt19937_64 rng_;
    nn::Mlp actor_, q1_, q2_, target_q1_, target_q2_;
    nn::Adam actor_opt_, q1_opt_, q2_opt_;
    double log_alpha_;
    double alpha_;
    nn::ScalarAdam alpha_opt_;
    double target_entropy_;
};

// Plugs an agent into the shared policy interface.
class SacPolicy final : public Policy {
public:
    SacPolicy(SacAgent& agent, ActMode mode) : agent_(agent), mode_(mode) {}
    int select(const Observation& obs) override { return agent_.act(obs.features, mode_); }
    std::string name() const override { return "sac"; }

private:
    SacAgent& agent_;
    ActMode mode_;
};

struct TrainingEpisode {
    int episode = 0;
    EpisodeSummary train;      // exploratory (Sample-mode) pass
    EpisodeSummary eval;       // Greedy-mode pass on the held-out workload
    bool evaluated = false;
    double actor_loss = 0.0;   // means over the episode's updates
    double critic_loss = 0.0;
    double entropy = 0.0;
    int updates = 0;
};

struct TrainingResult {
    std::vector<TrainingEpisode> curve;
    std::unique_ptr<SacAgent> agent;
    std::int64_t env_steps = 0;
};

/// Workload for training episode `episode` (0-based).
using WorkloadFactory = std::function<std::shared_ptr<const Workload>(int episode)>;

struct TrainOptions {
    int eval_every = 1;  // 0 disables periodic evaluation
    std::function<void(const TrainingEpisode&)> on_episode;
};

TrainingResult train_sac(const WorkloadFactory& factory, std::shared_ptr<const Workload> eval_workload,
                         const PenaltyConfig& penalties, const SacConfig& config, const TrainOptions& options = {});

}  // namespace aigc
