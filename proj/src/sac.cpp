#include "aigc/sac.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace aigc {

void SacConfig::validate() const
{
    auto fail = [](const std::string& field) { throw std::invalid_argument("invalid sac config: " + field); };
    if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma");
    if (!(tau > 0.0 && tau <= 1.0)) fail("tau");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail("alpha");
    if (!(target_entropy_ratio >= 0.0 && target_entropy_ratio <= 1.0)) fail("target_entropy_ratio");
    if (batch_size < 1) fail("batch_size");
    if (buffer_capacity < batch_size) fail("buffer_capacity");
    if (!(actor_lr > 0.0)) fail("actor_lr");
    if (!(critic_lr > 0.0)) fail("critic_lr");
    if (!(alpha_lr > 0.0)) fail("alpha_lr");
    if (!(lr_final_ratio > 0.0 && lr_final_ratio <= 1.0)) fail("lr_final_ratio");
    if (update_every < 1) fail("update_every");
    if (warmup_steps < 0) fail("warmup_steps");
    if (episodes < 0) fail("episodes");
    if (hidden.empty()) fail("hidden");
    for (int h : hidden)
        if (h < 1) fail("hidden");
    if (!(grad_clip > 0.0)) fail("grad_clip");
}

Batch Batch::from(const std::vector<const Transition*>& items)
{
    if (items.empty()) throw std::invalid_argument("Batch::from: empty batch");
    const auto dim = static_cast<Eigen::Index>(items.front()->state.size());
    const auto n = static_cast<Eigen::Index>(items.size());
    Batch b;
    b.states.resize(dim, n);
    b.next_states.resize(dim, n);
    b.rewards.resize(n);
    b.dones.resize(n);
    b.actions.resize(items.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const Transition& t = *items[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(t.state.size()) != dim || static_cast<Eigen::Index>(t.next_state.size()) != dim)
            throw std::invalid_argument("Batch::from: inconsistent state lengths");
        b.states.col(i) = Eigen::Map<const nn::Vector>(t.state.data(), dim);
        b.next_states.col(i) = Eigen::Map<const nn::Vector>(t.next_state.data(), dim);
        b.rewards(i) = t.reward;
        b.dones(i) = t.done ? 1.0 : 0.0;
        b.actions[static_cast<std::size_t>(i)] = t.action;
    }
    return b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity)
{
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t)
{
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
    } else {
        items_[cursor_] = std::move(t);
    }
    cursor_ = (cursor_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const
{
    if (i >= items_.size()) throw std::out_of_range("ReplayBuffer::at");
    // Once full, the oldest item sits at the cursor.
    const std::size_t base = items_.size() < capacity_ ? 0 : cursor_;
    return items_[(base + i) % items_.size()];
}

Batch ReplayBuffer::sample(std::size_t batch_size, std::mt19937_64& rng) const
{
    if (batch_size == 0 || items_.size() < batch_size)
        throw std::logic_error("ReplayBuffer::sample: buffer holds " + std::to_string(items_.size()) +
                               " transitions, batch needs " + std::to_string(batch_size));
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    std::vector<const Transition*> chosen(batch_size);
    for (auto& c : chosen) c = &items_[pick(rng)];
    return Batch::from(chosen);
}

nn::Matrix center_features(const nn::Matrix& states)
{
    return (2.0 * states.array() - 1.0).matrix();
}

nn::Vector critic_targets(const Batch& batch, const nn::Mlp& target_q1, const nn::Mlp& target_q2,
                          const nn::Mlp& actor, double alpha, double gamma)
{
    if (batch.size() == 0) throw std::invalid_argument("critic_targets: empty batch");
    const nn::Matrix logits = actor.forward(batch.next_states);
    const nn::Matrix q1 = target_q1.forward(batch.next_states);
    const nn::Matrix q2 = target_q2.forward(batch.next_states);
    if (q1.rows() != logits.rows() || q2.rows() != logits.rows())
        throw std::invalid_argument("critic_targets: actor/critic action counts differ");
    const nn::Matrix pi = nn::softmax_columns(logits);
    const nn::Matrix log_pi = nn::log_softmax_columns(logits);
    const nn::Matrix soft_q = q1.cwiseMin(q2) - alpha * log_pi;
    const nn::Vector value = pi.cwiseProduct(soft_q).colwise().sum().transpose();
    return batch.rewards.array() + gamma * (1.0 - batch.dones.array()) * value.array();
}

ActorObjective actor_objective(const nn::Matrix& logits, const nn::Matrix& q1, const nn::Matrix& q2, double alpha)
{
    const nn::Matrix pi = nn::softmax_columns(logits);
    const nn::Matrix log_pi = nn::log_softmax_columns(logits);
    const nn::Matrix f = alpha * log_pi - q1.cwiseMin(q2);
    const Eigen::RowVectorXd per_state = pi.cwiseProduct(f).colwise().sum();
    const auto n = static_cast<double>(logits.cols());

    ActorObjective out;
    out.loss = per_state.sum() / n;
    out.entropy = -pi.cwiseProduct(log_pi).sum() / n;
    // d/dz_k sum_a pi_a f_a = pi_k (f_k - sum_a pi_a f_a); the log-pi term contributes zero.
    out.logits_grad = pi.cwiseProduct(f.rowwise() - per_state) / n;
    return out;
}

SacAgent::SacAgent(int state_dim, int n_actions, SacConfig config)
    : state_dim_(state_dim), n_actions_(n_actions), config_(std::move(config))
{
    config_.validate();
    if (state_dim < 1 || n_actions < 1) throw std::invalid_argument("SacAgent: bad dimensions");
    rng_ = make_rng(config_.seed, RngStream::Agent, 0);
    std::vector<int> sizes{state_dim};
    sizes.insert(sizes.end(), config_.hidden.begin(), config_.hidden.end());
    sizes.push_back(n_actions);
    auto actor_init = make_rng(config_.seed, RngStream::Agent, 1);
    auto q1_init = make_rng(config_.seed, RngStream::Agent, 2);
    auto q2_init = make_rng(config_.seed, RngStream::Agent, 3);
    actor_ = nn::Mlp(sizes, actor_init);
    // Zero output layer: the initial policy is exactly uniform.
    actor_.params().weights.back().setZero();
    actor_.params().biases.back().setZero();
    q1_ = nn::Mlp(sizes, q1_init);
    q2_ = nn::Mlp(sizes, q2_init);
    target_q1_ = q1_;
    target_q2_ = q2_;
    actor_opt_ = nn::Adam(actor_, {.learning_rate = config_.actor_lr});
    q1_opt_ = nn::Adam(q1_, {.learning_rate = config_.critic_lr});
    q2_opt_ = nn::Adam(q2_, {.learning_rate = config_.critic_lr});
    alpha_ = config_.alpha;
    log_alpha_ = std::log(std::max(config_.alpha, 1e-12));
    alpha_opt_ = nn::ScalarAdam({.learning_rate = config_.alpha_lr});
    target_entropy_ = config_.target_entropy_ratio * std::log(static_cast<double>(n_actions));
}

nn::Vector SacAgent::probabilities(const StateVector& state) const
{
    if (static_cast<int>(state.size()) != state_dim_)
        throw std::invalid_argument("SacAgent: state length " + std::to_string(state.size()) + " != " +
                                    std::to_string(state_dim_));
    return nn::softmax(actor_.forward(nn::Vector(center_features(Eigen::Map<const nn::Vector>(state.data(), state_dim_)))));
}

int SacAgent::act(const StateVector& state, ActMode mode)
{
    if (static_cast<int>(state.size()) != state_dim_)
        throw std::invalid_argument("SacAgent: state length " + std::to_string(state.size()) + " != " +
                                    std::to_string(state_dim_));
    const nn::Vector logits =
        actor_.forward(nn::Vector(center_features(Eigen::Map<const nn::Vector>(state.data(), state_dim_))));
    if (mode == ActMode::Greedy) {
        Eigen::Index best = 0;
        logits.maxCoeff(&best);
        return static_cast<int>(best);
    }
    const nn::Vector p = nn::softmax(logits);
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    double acc = 0.0;
    for (Eigen::Index a = 0; a < p.size(); ++a) {
        acc += p(a);
        if (u < acc) return static_cast<int>(a);
    }
    return static_cast<int>(p.size() - 1);
}

double SacAgent::critic_step(nn::Mlp& net, nn::Adam& opt, const Batch& batch, const nn::Vector& targets)
{
    nn::ForwardCache cache;
    const nn::Matrix q = net.forward(batch.states, cache);
    const auto n = batch.size();
    nn::Matrix upstream = nn::Matrix::Zero(q.rows(), q.cols());
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto a = batch.actions[static_cast<std::size_t>(i)];
        const double err = q(a, i) - targets(i);
        loss += err * err;
        upstream(a, i) = 2.0 * err / static_cast<double>(n);
    }
    nn::ParamSet grads = net.backward(cache, upstream);
    nn::clip_grad_norm(grads, config_.grad_clip);
    opt.step(net.params(), grads);
    return loss / static_cast<double>(n);
}

LossReport SacAgent::update(const ReplayBuffer& buffer)
{
    return update_on(buffer.sample(static_cast<std::size_t>(config_.batch_size), rng_));
}

LossReport SacAgent::update_on(const Batch& raw)
{
    for (int a : raw.actions)
        if (a < 0 || a >= n_actions_) throw std::invalid_argument("SacAgent::update: action out of range");
    Batch batch = raw;
    batch.states = center_features(raw.states);
    batch.next_states = center_features(raw.next_states);
    LossReport report;
    const nn::Vector y = critic_targets(batch, target_q1_, target_q2_, actor_, alpha_, config_.gamma);
    report.critic1_loss = critic_step(q1_, q1_opt_, batch, y);
    report.critic2_loss = critic_step(q2_, q2_opt_, batch, y);

    nn::ForwardCache cache;
    const nn::Matrix logits = actor_.forward(batch.states, cache);
    const ActorObjective obj = actor_objective(logits, q1_.forward(batch.states), q2_.forward(batch.states), alpha_);
    nn::ParamSet grads = actor_.backward(cache, obj.logits_grad);
    nn::clip_grad_norm(grads, config_.grad_clip);
    actor_opt_.step(actor_.params(), grads);
    report.actor_loss = obj.loss;
    report.entropy = obj.entropy;

    if (config_.auto_alpha) {
        // d/d(log alpha) of -log_alpha * E[log pi + target] = entropy - target.
        log_alpha_ = alpha_opt_.step(log_alpha_, obj.entropy - target_entropy_);
        alpha_ = std::exp(log_alpha_);
    }
    report.alpha = alpha_;

    target_q1_.polyak_from(q1_, config_.tau);
    target_q2_.polyak_from(q2_, config_.tau);
    return report;
}

void SacAgent::set_learning_rate_scale(double ratio)
{
    actor_opt_.set_learning_rate(ratio * config_.actor_lr);
    q1_opt_.set_learning_rate(ratio * config_.critic_lr);
    q2_opt_.set_learning_rate(ratio * config_.critic_lr);
    alpha_opt_.set_learning_rate(ratio * config_.alpha_lr);
}

void SacAgent::save(const std::filesystem::path& dir) const
{
    std::filesystem::create_directories(dir);
    auto write = [&](const char* name, const nn::Mlp& net) {
        const auto path = dir / name;
        const auto tmp = dir / (std::string(name) + ".tmp");
        {
            std::ofstream out(tmp);
            if (!out) throw std::runtime_error("cannot write " + tmp.string());
            net.save(out);
        }
        std::filesystem::rename(tmp, path);
    };
    write("actor.json", actor_);
    write("critic1.json", q1_);
    write("critic2.json", q2_);
}

SacAgent SacAgent::load(const std::filesystem::path& dir, SacConfig config)
{
    auto read = [&](const char* name) {
        std::ifstream in(dir / name);
        if (!in) throw std::runtime_error("cannot read " + (dir / name).string());
        return nn::Mlp::load(in);
    };
    nn::Mlp actor = read("actor.json");
    const auto& sizes = actor.layer_sizes();
    config.hidden.assign(sizes.begin() + 1, sizes.end() - 1);
    SacAgent agent(actor.input_size(), actor.output_size(), config);
    agent.actor_ = std::move(actor);
    if (std::filesystem::exists(dir / "critic1.json") && std::filesystem::exists(dir / "critic2.json")) {
        agent.q1_ = read("critic1.json");
        agent.q2_ = read("critic2.json");
        agent.target_q1_ = agent.q1_;
        agent.target_q2_ = agent.q2_;
    }
    return agent;
}

TrainingResult train_sac(const WorkloadFactory& factory, std::shared_ptr<const Workload> eval_workload,
                         const PenaltyConfig& penalties, const SacConfig& config, const TrainOptions& options)
{
    config.validate();
    TrainingResult result;
    std::shared_ptr<const Workload> first = factory(0);
    const int n_asps = static_cast<int>(first->asps.size());
    result.agent = std::make_unique<SacAgent>(static_cast<int>(state_size(n_asps)), n_asps, config);
    SacAgent& agent = *result.agent;
    ReplayBuffer buffer(static_cast<std::size_t>(config.buffer_capacity));

    for (int ep = 0; ep < config.episodes; ++ep) {
        auto workload = ep == 0 ? first : factory(ep);
        if (static_cast<int>(workload->asps.size()) != n_asps)
            throw std::invalid_argument("train_sac: ASP count changed between episodes");
        if (config.episodes > 1)
            agent.set_learning_rate_scale(1.0 + (config.lr_final_ratio - 1.0) * ep / (config.episodes - 1));
        EdgeEnv env(workload, penalties, false);
        TrainingEpisode rec;
        rec.episode = ep;
        StateVector state = env.reset();
        while (!env.done()) {
            const int action = agent.act(state, ActMode::Sample);
            StepOutcome o = env.step(action);
            buffer.push(Transition{state, action, o.reward, o.next_state, o.done});
            state = std::move(o.next_state);
            ++result.env_steps;
            if (result.env_steps > config.warmup_steps && buffer.size() >= static_cast<std::size_t>(config.batch_size) &&
                result.env_steps % config.update_every == 0) {
                const LossReport r = agent.update(buffer);
                rec.actor_loss += r.actor_loss;
                rec.critic_loss += 0.5 * (r.critic1_loss + r.critic2_loss);
                rec.entropy += r.entropy;
                ++rec.updates;
            }
        }
        rec.train = env.summary();
        if (rec.updates > 0) {
            rec.actor_loss /= rec.updates;
            rec.critic_loss /= rec.updates;
            rec.entropy /= rec.updates;
        }
        const bool last = ep + 1 == config.episodes;
        if (eval_workload && options.eval_every > 0 && ((ep + 1) % options.eval_every == 0 || last)) {
            EdgeEnv eval_env(eval_workload, penalties, false);
            SacPolicy greedy(agent, ActMode::Greedy);
            rec.eval = run_episode(eval_env, [&](const Observation& obs) { return greedy.select(obs); }).summary;
            rec.evaluated = true;
        }
        if (options.on_episode) options.on_episode(rec);
        result.curve.push_back(rec);
    }
    return result;
}

}  // namespace aigc
