#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "holostream/policy.hpp"

namespace holostream {

// One interaction step as stored for learning. `log_prob` and `value` are
// evaluated by the behavior policy at collection time; since updates only run
// between episodes, they constitute the frozen "old policy" terms of the
// clipped surrogate.
struct Transition {
  Eigen::VectorXd obs;
  std::vector<int> action;
  double reward = 0.0;
  double value = 0.0;
  double log_prob = 0.0;
  bool done = false;
};

using RolloutBuffer = std::vector<Transition>;

struct PpoConfig {
  double discount = 0.90;
  double gae_lambda = 1.0;
  double clip = 0.2;
  int epochs = 4;
  int minibatch = 64;
  int batch = 240;  // transitions accumulated before an update
  double actor_lr = 3e-4;
  double critic_lr = 1e-3;
  double entropy_coef = 0.01;
  double max_grad_norm = 0.5;
  bool normalize_advantages = true;
  double reward_scale = 1.0;  // training-side scaling; logged rewards stay raw
  // Optional soft-updated critic used as the advantage baseline: 0 disables
  // it (advantages use collection-time values); a rate in (0, 1] blends the
  // target critic toward the live one after every update and evaluates the
  // baseline values with the target at update time.
  double critic_polyak = 0.0;

  void validate() const;
};

// Clipped-surrogate objective for a single sample, written as the explicit
// three-branch rule:
//   adv > 0, ratio >= 1+clip  ->  (1+clip) * adv
//   adv < 0, ratio <= 1-clip  ->  (1-clip) * adv
//   otherwise                 ->  ratio * adv
// This equals min(ratio*adv, clamp(ratio, 1-clip, 1+clip)*adv) identically.
double ppo_clip_objective(double ratio, double advantage, double clip);

// Discounted reward-to-go and generalized advantage estimates over a buffer
// of whole episodes (the final transition must be terminal). Episode
// boundaries are the `done` flags; values bootstrap from the stored critic
// evaluations, with V := 0 past a terminal step. With gae_lambda = 1 the
// advantages reduce to (return - value).
struct GaeResult {
  Eigen::VectorXd returns;
  Eigen::VectorXd advantages;
};
GaeResult compute_returns_advantages(const RolloutBuffer& buffer,
                                     double discount, double gae_lambda);

// Mean PPO losses and their exact parameter gradients over an index subset of
// the buffer. This is the precise computation the optimizer consumes, kept
// free-standing so gradients can be validated against finite differences.
struct LossProbe {
  double actor_loss = 0.0;   // -surrogate - entropy_coef * entropy
  double critic_loss = 0.0;  // 0.5 * (V - return)^2
  double entropy = 0.0;
  Eigen::VectorXd actor_grad;
  Eigen::VectorXd critic_grad;
};
LossProbe ppo_loss_and_gradients(const TilePolicy& policy,
                                 const RolloutBuffer& buffer,
                                 const std::vector<int>& index,
                                 const Eigen::VectorXd& advantages,
                                 const Eigen::VectorXd& returns,
                                 const PpoConfig& config);

// Minimal environment surface the trainer needs. Episodes are indexed so the
// environment can derive its per-episode randomness deterministically.
class RolloutEnv {
 public:
  virtual ~RolloutEnv() = default;
  virtual int observation_size() const = 0;
  virtual int action_heads() const = 0;
  virtual ActionCodec action_codec() const = 0;

  struct Step {
    Eigen::VectorXd obs;
    double reward = 0.0;
    bool done = false;
  };
  virtual Eigen::VectorXd reset(int episode) = 0;
  virtual Step step(const std::vector<int>& action) = 0;
};

struct UpdateStats {
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
};

struct TrainingLog {
  std::vector<double> episode_rewards;
  std::vector<UpdateStats> updates;
};

// On-policy PPO driver: collects whole episodes, updates once the buffer has
// reached `batch` transitions, clears it, and repeats.
class PpoAgent {
 public:
  PpoAgent(const PolicyConfig& policy_config, const PpoConfig& ppo_config,
           std::uint64_t seed);
  explicit PpoAgent(TilePolicy policy, const PpoConfig& ppo_config,
                    std::uint64_t seed);

  TilePolicy& policy() { return policy_; }
  const TilePolicy& policy() const { return policy_; }

  UpdateStats update(const RolloutBuffer& buffer);

  TrainingLog train(RolloutEnv& env, int episodes,
                    const std::function<void(int, double)>& on_episode = {});

 private:
  TilePolicy policy_;
  PpoConfig config_;
  AdamOptimizer actor_opt_;
  AdamOptimizer critic_opt_;
  DenseNet critic_target_;  // used only when config_.critic_polyak > 0
  std::uint64_t seed_;
  long update_counter_ = 0;
};

// Rolls `episodes` episodes with an arbitrary action rule; returns the total
// (undiscounted) reward of each episode.
using ActionFn = std::function<std::vector<int>(const Eigen::VectorXd& obs,
                                                int episode, int slot)>;
std::vector<double> rollout_rewards(RolloutEnv& env, const ActionFn& act,
                                    int episodes, int first_episode = 0);

// Convenience rules: greedy evaluation of a trained policy and a
// uniform-random reference.
ActionFn greedy_rule(const TilePolicy& policy);
ActionFn random_rule(int heads, int choices, std::uint64_t seed);

}  // namespace holostream
