#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "holostream/mlp.hpp"
#include "holostream/rng.hpp"

namespace holostream {

// Bijection between a categorical choice index and a (level, compress) pair.
// With compression enabled a head has 2L choices: c -> level = c % L + 1,
// compress = c / L. Without it, c -> level c + 1 and compress is always 0.
struct ActionCodec {
  int levels = 0;
  bool with_compression = true;

  int choices() const { return with_compression ? 2 * levels : levels; }

  std::pair<int, int> decode(int choice) const {
    if (choice < 0 || choice >= choices()) {
      throw std::invalid_argument("ActionCodec: choice out of range");
    }
    if (!with_compression) return {choice + 1, 0};
    return {choice % levels + 1, choice / levels};
  }

  int encode(int level, int compress) const {
    if (level < 1 || level > levels || compress < 0 || compress > 1 ||
        (compress == 1 && !with_compression)) {
      throw std::invalid_argument("ActionCodec: (level, compress) out of range");
    }
    return (level - 1) + compress * levels;
  }
};

struct PolicyConfig {
  int observation_size = 0;
  int heads = 0;  // one categorical head per (user, tile) pair
  ActionCodec codec;
  int hidden = 128;

  void validate() const {
    if (observation_size < 1 || heads < 1 || codec.levels < 1 || hidden < 1) {
      throw std::invalid_argument("PolicyConfig: sizes must be >= 1");
    }
  }
};

// Actor-critic pair over a factorized categorical action space. The actor
// emits heads*choices logits, interpreted as independent per-head softmax
// distributions; the joint log-probability is the sum over heads. The critic
// is a separate scalar-output network.
class TilePolicy {
 public:
  TilePolicy(const PolicyConfig& config, std::uint64_t seed);

  const PolicyConfig& config() const { return config_; }

  // heads x choices matrix of per-head probabilities.
  Eigen::MatrixXd action_probs(const Eigen::VectorXd& obs) const;
  double value(const Eigen::VectorXd& obs) const;

  std::vector<int> sample(const Eigen::MatrixXd& probs,
                          rng::Engine& eng) const;
  std::vector<int> greedy(const Eigen::MatrixXd& probs) const;
  double log_prob(const Eigen::MatrixXd& probs,
                  const std::vector<int>& action) const;
  double entropy(const Eigen::MatrixXd& probs) const;

  // Reshapes raw actor output into the heads x choices probability matrix.
  Eigen::MatrixXd logits_to_probs(const Eigen::VectorXd& logits) const;

  DenseNet& actor() { return actor_; }
  const DenseNet& actor() const { return actor_; }
  DenseNet& critic() { return critic_; }
  const DenseNet& critic() const { return critic_; }

  // Text checkpoints with full double precision; load() rejects files whose
  // architecture line disagrees with the stored one.
  void save(const std::string& path) const;
  static TilePolicy load(const std::string& path);

 private:
  PolicyConfig config_;
  DenseNet actor_;
  DenseNet critic_;
};

}  // namespace holostream
