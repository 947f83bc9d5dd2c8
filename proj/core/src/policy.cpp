#include "holostream/policy.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace holostream {

TilePolicy::TilePolicy(const PolicyConfig& config, std::uint64_t seed)
    : config_(config),
      actor_(DenseNet()),
      critic_(DenseNet()) {
  config_.validate();
  actor_ = DenseNet::create(config.observation_size, config.hidden,
                            config.heads * config.codec.choices(),
                            rng::mix(seed, rng::Stream::kInit, 1),
                            /*zero_output=*/true);
  critic_ = DenseNet::create(config.observation_size, config.hidden, 1,
                             rng::mix(seed, rng::Stream::kInit, 2),
                             /*zero_output=*/false);
}

Eigen::MatrixXd TilePolicy::logits_to_probs(
    const Eigen::VectorXd& logits) const {
  const int heads = config_.heads;
  const int choices = config_.codec.choices();
  if (logits.size() != static_cast<Eigen::Index>(heads) * choices) {
    throw std::invalid_argument("TilePolicy: logits size mismatch");
  }
  Eigen::MatrixXd probs(heads, choices);
  for (int hd = 0; hd < heads; ++hd) {
    Eigen::ArrayXd row =
        logits.segment(static_cast<Eigen::Index>(hd) * choices, choices).array();
    row -= row.maxCoeff();  // softmax shift for stability
    row = row.exp();
    probs.row(hd) = (row / row.sum()).matrix().transpose();
  }
  return probs;
}

Eigen::MatrixXd TilePolicy::action_probs(const Eigen::VectorXd& obs) const {
  return logits_to_probs(actor_.forward(obs));
}

double TilePolicy::value(const Eigen::VectorXd& obs) const {
  return critic_.forward(obs)(0);
}

std::vector<int> TilePolicy::sample(const Eigen::MatrixXd& probs,
                                    rng::Engine& eng) const {
  std::vector<int> action(probs.rows());
  for (Eigen::Index hd = 0; hd < probs.rows(); ++hd) {
    const double u = eng.uniform();
    double cum = 0.0;
    int pick = static_cast<int>(probs.cols()) - 1;
    for (Eigen::Index c = 0; c < probs.cols(); ++c) {
      cum += probs(hd, c);
      if (u < cum) {
        pick = static_cast<int>(c);
        break;
      }
    }
    action[static_cast<std::size_t>(hd)] = pick;
  }
  return action;
}

std::vector<int> TilePolicy::greedy(const Eigen::MatrixXd& probs) const {
  std::vector<int> action(probs.rows());
  for (Eigen::Index hd = 0; hd < probs.rows(); ++hd) {
    Eigen::Index best = 0;
    probs.row(hd).maxCoeff(&best);
    action[static_cast<std::size_t>(hd)] = static_cast<int>(best);
  }
  return action;
}

double TilePolicy::log_prob(const Eigen::MatrixXd& probs,
                            const std::vector<int>& action) const {
  if (static_cast<Eigen::Index>(action.size()) != probs.rows()) {
    throw std::invalid_argument("TilePolicy: action/head count mismatch");
  }
  double lp = 0.0;
  for (Eigen::Index hd = 0; hd < probs.rows(); ++hd) {
    const int a = action[static_cast<std::size_t>(hd)];
    if (a < 0 || a >= probs.cols()) {
      throw std::invalid_argument("TilePolicy: action choice out of range");
    }
    lp += std::log(probs(hd, a));
  }
  return lp;
}

double TilePolicy::entropy(const Eigen::MatrixXd& probs) const {
  double ent = 0.0;
  for (Eigen::Index hd = 0; hd < probs.rows(); ++hd) {
    for (Eigen::Index c = 0; c < probs.cols(); ++c) {
      const double p = probs(hd, c);
      if (p > 0.0) ent -= p * std::log(p);
    }
  }
  return ent;
}

void TilePolicy::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("TilePolicy: cannot open checkpoint for write: " +
                             path);
  }
  out.precision(17);
  out << "holostream-policy 1\n";
  out << config_.observation_size << ' ' << config_.heads << ' '
      << config_.codec.levels << ' ' << (config_.codec.with_compression ? 1 : 0)
      << ' ' << config_.hidden << '\n';
  const Eigen::VectorXd a = actor_.flatten();
  const Eigen::VectorXd c = critic_.flatten();
  out << a.size() << ' ' << c.size() << '\n';
  for (Eigen::Index i = 0; i < a.size(); ++i) out << a(i) << '\n';
  for (Eigen::Index i = 0; i < c.size(); ++i) out << c(i) << '\n';
  if (!out) {
    throw std::runtime_error("TilePolicy: checkpoint write failed: " + path);
  }
}

TilePolicy TilePolicy::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("TilePolicy: cannot open checkpoint: " + path);
  }
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "holostream-policy" || version != 1) {
    throw std::runtime_error("TilePolicy: unrecognized checkpoint header in " +
                             path);
  }
  PolicyConfig cfg;
  int with_compression = 0;
  in >> cfg.observation_size >> cfg.heads >> cfg.codec.levels >>
      with_compression >> cfg.hidden;
  cfg.codec.with_compression = with_compression != 0;
  long actor_n = 0;
  long critic_n = 0;
  in >> actor_n >> critic_n;
  if (!in) {
    throw std::runtime_error("TilePolicy: malformed checkpoint header in " +
                             path);
  }
  TilePolicy policy(cfg, /*seed=*/0);
  if (actor_n != policy.actor_.param_count() ||
      critic_n != policy.critic_.param_count()) {
    throw std::runtime_error(
        "TilePolicy: checkpoint architecture mismatch in " + path);
  }
  Eigen::VectorXd a(actor_n), c(critic_n);
  for (long i = 0; i < actor_n; ++i) in >> a(i);
  for (long i = 0; i < critic_n; ++i) in >> c(i);
  if (!in) {
    throw std::runtime_error("TilePolicy: truncated checkpoint: " + path);
  }
  policy.actor_.unflatten(a);
  policy.critic_.unflatten(c);
  return policy;
}

}  // namespace holostream
