#include "holostream/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace holostream {

void PpoConfig::validate() const {
  if (!(discount > 0.0 && discount <= 1.0)) {
    throw std::invalid_argument("PpoConfig: discount must be in (0, 1]");
  }
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) {
    throw std::invalid_argument("PpoConfig: gae_lambda must be in [0, 1]");
  }
  if (!(clip > 0.0 && clip < 1.0)) {
    throw std::invalid_argument("PpoConfig: clip must be in (0, 1)");
  }
  if (epochs < 1 || minibatch < 1 || batch < 1) {
    throw std::invalid_argument("PpoConfig: epochs/minibatch/batch must be >= 1");
  }
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) {
    throw std::invalid_argument("PpoConfig: learning rates must be > 0");
  }
  if (entropy_coef < 0.0 || max_grad_norm <= 0.0 || !(reward_scale > 0.0)) {
    throw std::invalid_argument("PpoConfig: bad entropy/clip-norm/reward scale");
  }
  if (critic_polyak < 0.0 || critic_polyak > 1.0) {
    throw std::invalid_argument("PpoConfig: critic_polyak must be in [0, 1]");
  }
}

double ppo_clip_objective(double ratio, double advantage, double clip) {
  if (advantage > 0.0 && ratio >= 1.0 + clip) return (1.0 + clip) * advantage;
  if (advantage < 0.0 && ratio <= 1.0 - clip) return (1.0 - clip) * advantage;
  return ratio * advantage;
}

GaeResult compute_returns_advantages(const RolloutBuffer& buffer,
                                     double discount, double gae_lambda) {
  if (buffer.empty()) {
    throw std::invalid_argument("compute_returns_advantages: empty buffer");
  }
  if (!buffer.back().done) {
    throw std::invalid_argument(
        "compute_returns_advantages: buffer must end on a terminal step");
  }
  const int n = static_cast<int>(buffer.size());
  GaeResult out;
  out.returns.resize(n);
  out.advantages.resize(n);
  double running_return = 0.0;
  double running_adv = 0.0;
  for (int t = n - 1; t >= 0; --t) {
    const Transition& tr = buffer[t];
    const double next_value = tr.done ? 0.0 : buffer[t + 1].value;
    if (tr.done) {
      running_return = 0.0;
      running_adv = 0.0;
    }
    running_return = tr.reward + discount * running_return;
    const double delta = tr.reward + discount * next_value - tr.value;
    running_adv = delta + discount * gae_lambda * running_adv;
    out.returns(t) = running_return;
    out.advantages(t) = running_adv;
  }
  return out;
}

LossProbe ppo_loss_and_gradients(const TilePolicy& policy,
                                 const RolloutBuffer& buffer,
                                 const std::vector<int>& index,
                                 const Eigen::VectorXd& advantages,
                                 const Eigen::VectorXd& returns,
                                 const PpoConfig& config) {
  if (index.empty()) {
    throw std::invalid_argument("ppo_loss_and_gradients: empty index set");
  }
  const int heads = policy.config().heads;
  const int choices = policy.config().codec.choices();

  DenseNet actor_grad = DenseNet::zeros_like(policy.actor());
  DenseNet critic_grad = DenseNet::zeros_like(policy.critic());
  LossProbe probe;

  Eigen::VectorXd dlogits(static_cast<Eigen::Index>(heads) * choices);
  for (int i : index) {
    const Transition& tr = buffer[static_cast<std::size_t>(i)];
    const double adv = advantages(i);

    // Actor: clipped surrogate plus entropy bonus.
    DenseNet::Trace trace;
    const Eigen::VectorXd logits = policy.actor().forward(tr.obs, trace);
    const Eigen::MatrixXd probs = policy.logits_to_probs(logits);
    const double new_lp = policy.log_prob(probs, tr.action);
    const double ratio = std::exp(new_lp - tr.log_prob);
    const double unclipped = ratio * adv;
    const double objective = ppo_clip_objective(ratio, adv, config.clip);
    // d(objective)/d(new_lp): the surrogate is active only when the
    // unclipped branch attains the min (ties included), where it equals
    // ratio*adv itself.
    const double clipped_alt =
        std::clamp(ratio, 1.0 - config.clip, 1.0 + config.clip) * adv;
    const double surrogate_coef = (unclipped <= clipped_alt) ? unclipped : 0.0;

    double entropy = 0.0;
    for (int hd = 0; hd < heads; ++hd) {
      double head_entropy = 0.0;
      for (int c = 0; c < choices; ++c) {
        const double p = probs(hd, c);
        if (p > 0.0) head_entropy -= p * std::log(p);
      }
      entropy += head_entropy;
      const int a = tr.action[static_cast<std::size_t>(hd)];
      for (int c = 0; c < choices; ++c) {
        const double p = probs(hd, c);
        const double d_logp = (c == a ? 1.0 : 0.0) - p;
        const double d_entropy =
            (p > 0.0) ? -p * (std::log(p) + head_entropy) : 0.0;
        dlogits(static_cast<Eigen::Index>(hd) * choices + c) =
            -surrogate_coef * d_logp - config.entropy_coef * d_entropy;
      }
    }
    policy.actor().backward(trace, dlogits, actor_grad);
    probe.actor_loss += -objective - config.entropy_coef * entropy;
    probe.entropy += entropy;

    // Critic: squared error against the discounted return.
    DenseNet::Trace vtrace;
    const double v = policy.critic().forward(tr.obs, vtrace)(0);
    const double err = v - returns(i);
    probe.critic_loss += 0.5 * err * err;
    policy.critic().backward(vtrace, Eigen::VectorXd::Constant(1, err),
                             critic_grad);
  }

  const double inv = 1.0 / static_cast<double>(index.size());
  probe.actor_loss *= inv;
  probe.critic_loss *= inv;
  probe.entropy *= inv;
  actor_grad.scale(inv);
  critic_grad.scale(inv);
  probe.actor_grad = actor_grad.flatten();
  probe.critic_grad = critic_grad.flatten();
  return probe;
}

namespace {

void clip_by_norm(Eigen::VectorXd& grad, double max_norm) {
  const double norm = grad.norm();
  if (norm > max_norm) grad *= max_norm / norm;
}

}  // namespace

PpoAgent::PpoAgent(const PolicyConfig& policy_config,
                   const PpoConfig& ppo_config, std::uint64_t seed)
    : PpoAgent(TilePolicy(policy_config, seed), ppo_config, seed) {}

PpoAgent::PpoAgent(TilePolicy policy, const PpoConfig& ppo_config,
                   std::uint64_t seed)
    : policy_(std::move(policy)),
      config_(ppo_config),
      actor_opt_(policy_.actor().param_count(), ppo_config.actor_lr),
      critic_opt_(policy_.critic().param_count(), ppo_config.critic_lr),
      critic_target_(policy_.critic()),
      seed_(seed) {
  config_.validate();
}

UpdateStats PpoAgent::update(const RolloutBuffer& buffer) {
  // Rewards are scaled up front so returns, the critic's regression target,
  // and the stored critic values (which track scaled returns) stay in the
  // same units. The optional target critic replaces the baseline values.
  RolloutBuffer staged = buffer;
  for (Transition& tr : staged) {
    tr.reward *= config_.reward_scale;
    if (config_.critic_polyak > 0.0) {
      DenseNet::Trace trace;
      tr.value = critic_target_.forward(tr.obs, trace)(0);
    }
  }
  GaeResult gae =
      compute_returns_advantages(staged, config_.discount, config_.gae_lambda);
  if (config_.normalize_advantages && gae.advantages.size() > 1) {
    const double mean = gae.advantages.mean();
    const double var =
        (gae.advantages.array() - mean).square().sum() /
        static_cast<double>(gae.advantages.size());
    gae.advantages = (gae.advantages.array() - mean) / (std::sqrt(var) + 1e-8);
  }

  // Old-policy log probabilities for the KL diagnostic.
  Eigen::VectorXd old_lp(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) old_lp(i) = buffer[i].log_prob;

  std::vector<int> order(buffer.size());
  std::iota(order.begin(), order.end(), 0);

  UpdateStats stats;
  int minibatches = 0;
  Eigen::VectorXd actor_params = policy_.actor().flatten();
  Eigen::VectorXd critic_params = policy_.critic().flatten();
  for (int epoch = 0; epoch < config_.epochs; ++epoch) {
    rng::Engine eng(
        rng::mix(seed_, rng::Stream::kShuffle, update_counter_, epoch));
    // Fisher-Yates by hand: std::shuffle's draw sequence varies across
    // standard-library implementations, which would break run reproducibility.
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(eng.below(i));
      std::swap(order[i - 1], order[j]);
    }
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config_.minibatch)) {
      const std::size_t stop = std::min(
          order.size(), start + static_cast<std::size_t>(config_.minibatch));
      const std::vector<int> chunk(order.begin() + start, order.begin() + stop);
      const LossProbe probe = ppo_loss_and_gradients(
          policy_, staged, chunk, gae.advantages, gae.returns, config_);
      if (!probe.actor_grad.allFinite() || !probe.critic_grad.allFinite()) {
        throw std::runtime_error(
            "PpoAgent: non-finite gradient at update " +
            std::to_string(update_counter_) + ", epoch " +
            std::to_string(epoch));
      }
      Eigen::VectorXd ag = probe.actor_grad;
      Eigen::VectorXd cg = probe.critic_grad;
      clip_by_norm(ag, config_.max_grad_norm);
      clip_by_norm(cg, config_.max_grad_norm);
      actor_opt_.step(actor_params, ag);
      critic_opt_.step(critic_params, cg);
      policy_.actor().unflatten(actor_params);
      policy_.critic().unflatten(critic_params);
      stats.actor_loss += probe.actor_loss;
      stats.critic_loss += probe.critic_loss;
      stats.entropy += probe.entropy;
      ++minibatches;
    }
  }
  if (minibatches > 0) {
    stats.actor_loss /= minibatches;
    stats.critic_loss /= minibatches;
    stats.entropy /= minibatches;
  }

  // Mean KL(old || new) estimate over the whole batch.
  double kl = 0.0;
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const Eigen::MatrixXd probs = policy_.action_probs(buffer[i].obs);
    kl += old_lp(i) - policy_.log_prob(probs, buffer[i].action);
  }
  stats.approx_kl = kl / static_cast<double>(buffer.size());

  if (config_.critic_polyak > 0.0) {
    Eigen::VectorXd blended = critic_target_.flatten();
    blended = (1.0 - config_.critic_polyak) * blended +
              config_.critic_polyak * policy_.critic().flatten();
    critic_target_.unflatten(blended);
  }
  ++update_counter_;
  return stats;
}

TrainingLog PpoAgent::train(RolloutEnv& env, int episodes,
                            const std::function<void(int, double)>& on_episode) {
  if (episodes < 1) {
    throw std::invalid_argument("PpoAgent: episodes must be >= 1");
  }
  if (env.action_heads() != policy_.config().heads ||
      env.observation_size() != policy_.config().observation_size ||
      env.action_codec().choices() != policy_.config().codec.choices()) {
    throw std::invalid_argument("PpoAgent: environment/policy shape mismatch");
  }
  TrainingLog log;
  RolloutBuffer buffer;
  buffer.reserve(static_cast<std::size_t>(config_.batch) + 1024);
  for (int ep = 0; ep < episodes; ++ep) {
    rng::Engine sampler(rng::mix(seed_, rng::Stream::kPolicy, ep));
    Eigen::VectorXd obs = env.reset(ep);
    double total = 0.0;
    bool done = false;
    while (!done) {
      const Eigen::MatrixXd probs = policy_.action_probs(obs);
      Transition tr;
      tr.obs = obs;
      tr.action = policy_.sample(probs, sampler);
      tr.log_prob = policy_.log_prob(probs, tr.action);
      tr.value = policy_.value(obs);
      const RolloutEnv::Step step = env.step(tr.action);
      tr.reward = step.reward;
      tr.done = step.done;
      total += step.reward;
      buffer.push_back(std::move(tr));
      obs = step.obs;
      done = step.done;
    }
    log.episode_rewards.push_back(total);
    if (on_episode) on_episode(ep, total);
    if (static_cast<int>(buffer.size()) >= config_.batch) {
      log.updates.push_back(update(buffer));
      buffer.clear();
    }
  }
  return log;
}

std::vector<double> rollout_rewards(RolloutEnv& env, const ActionFn& act,
                                    int episodes, int first_episode) {
  std::vector<double> rewards;
  rewards.reserve(static_cast<std::size_t>(episodes));
  for (int ep = 0; ep < episodes; ++ep) {
    const int index = first_episode + ep;
    Eigen::VectorXd obs = env.reset(index);
    double total = 0.0;
    bool done = false;
    int slot = 0;
    while (!done) {
      const RolloutEnv::Step step = env.step(act(obs, index, slot));
      total += step.reward;
      obs = step.obs;
      done = step.done;
      ++slot;
    }
    rewards.push_back(total);
  }
  return rewards;
}

ActionFn greedy_rule(const TilePolicy& policy) {
  return [&policy](const Eigen::VectorXd& obs, int, int) {
    return policy.greedy(policy.action_probs(obs));
  };
}

ActionFn random_rule(int heads, int choices, std::uint64_t seed) {
  return [heads, choices, seed](const Eigen::VectorXd&, int episode, int slot) {
    rng::Engine eng(rng::mix(seed, rng::Stream::kPolicy, episode, slot));
    std::vector<int> action(static_cast<std::size_t>(heads));
    for (int hd = 0; hd < heads; ++hd) {
      action[static_cast<std::size_t>(hd)] =
          static_cast<int>(eng.below(static_cast<std::uint64_t>(choices)));
    }
    return action;
  };
}

}  // namespace holostream
