#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "holostream/policy.hpp"
#include "support/test_util.hpp"

using namespace holostream;
using test::random_vector;
using test::rel_err;

namespace {

PolicyConfig small_config() {
  PolicyConfig cfg;
  cfg.observation_size = 6;
  cfg.heads = 3;
  cfg.codec.levels = 4;
  cfg.codec.with_compression = true;
  cfg.hidden = 16;
  return cfg;
}

std::string temp_path(const char* name) {
  return std::string("policy_test_") + name + ".txt";
}

}  // namespace

TEST_CASE("the codec is a bijection between choices and decisions") {
  for (const bool with_compression : {true, false}) {
    for (int levels = 1; levels <= 5; ++levels) {
      const ActionCodec codec{levels, with_compression};
      const int choices = codec.choices();
      CHECK(choices == (with_compression ? 2 * levels : levels));
      std::vector<bool> seen(static_cast<std::size_t>(choices), false);
      for (int c = 0; c < choices; ++c) {
        const auto [level, compress] = codec.decode(c);
        CHECK(level >= 1);
        CHECK(level <= levels);
        CHECK(compress >= 0);
        CHECK(compress <= (with_compression ? 1 : 0));
        CHECK(codec.encode(level, compress) == c);
        seen[static_cast<std::size_t>(c)] = true;
      }
      for (const bool b : seen) CHECK(b);
    }
  }
  const ActionCodec codec{3, true};
  CHECK(codec.decode(0) == std::pair<int, int>{1, 0});
  CHECK(codec.decode(5) == std::pair<int, int>{3, 1});
  CHECK_THROWS_AS(codec.decode(-1), std::invalid_argument);
  CHECK_THROWS_AS(codec.decode(6), std::invalid_argument);
  CHECK_THROWS_AS(codec.encode(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(codec.encode(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(codec.encode(1, 2), std::invalid_argument);
  CHECK_THROWS_AS((ActionCodec{3, false}.encode(1, 1)), std::invalid_argument);
}

TEST_CASE("a fresh policy starts exactly uniform over every head") {
  const PolicyConfig cfg = small_config();
  const TilePolicy policy(cfg, 7);
  rng::Engine eng(1);
  const Eigen::MatrixXd probs =
      policy.action_probs(random_vector(cfg.observation_size, eng));
  REQUIRE(probs.rows() == cfg.heads);
  REQUIRE(probs.cols() == cfg.codec.choices());
  const double uniform = 1.0 / cfg.codec.choices();
  for (Eigen::Index hd = 0; hd < probs.rows(); ++hd) {
    for (Eigen::Index c = 0; c < probs.cols(); ++c) {
      CHECK(probs(hd, c) == doctest::Approx(uniform).epsilon(1e-12));
    }
  }
  CHECK(policy.entropy(probs) ==
        doctest::Approx(cfg.heads * std::log(cfg.codec.choices()))
            .epsilon(1e-12));
}

TEST_CASE("probability rows stay normalized after parameter noise") {
  const PolicyConfig cfg = small_config();
  TilePolicy policy(cfg, 3);
  rng::Engine eng(2);
  Eigen::VectorXd params = policy.actor().flatten();
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    params(i) += 0.3 * eng.gaussian();
  }
  policy.actor().unflatten(params);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd probs = policy.action_probs(
        random_vector(cfg.observation_size, eng, -2.0, 2.0));
    for (Eigen::Index hd = 0; hd < probs.rows(); ++hd) {
      CHECK(rel_err(probs.row(hd).sum(), 1.0) < 1e-12);
      CHECK(probs.row(hd).minCoeff() > 0.0);
    }
  }
}

TEST_CASE("joint log probability factorizes over heads") {
  const PolicyConfig cfg = small_config();
  TilePolicy policy(cfg, 5);
  rng::Engine eng(3);
  Eigen::VectorXd params = policy.actor().flatten();
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    params(i) += 0.2 * eng.gaussian();
  }
  policy.actor().unflatten(params);
  const Eigen::MatrixXd probs =
      policy.action_probs(random_vector(cfg.observation_size, eng));
  const std::vector<int> action = {1, 6, 3};
  double manual = 0.0;
  for (int hd = 0; hd < cfg.heads; ++hd) {
    manual += std::log(probs(hd, action[static_cast<std::size_t>(hd)]));
  }
  CHECK(policy.log_prob(probs, action) ==
        doctest::Approx(manual).epsilon(1e-12));
  CHECK_THROWS_AS(policy.log_prob(probs, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(policy.log_prob(probs, {1, 2, 8}), std::invalid_argument);
}

TEST_CASE("sampling follows the distribution and replays deterministically") {
  const PolicyConfig cfg = small_config();
  TilePolicy policy(cfg, 11);
  rng::Engine eng(4);
  Eigen::VectorXd params = policy.actor().flatten();
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    params(i) += 0.4 * eng.gaussian();
  }
  policy.actor().unflatten(params);
  const Eigen::MatrixXd probs =
      policy.action_probs(random_vector(cfg.observation_size, eng));

  rng::Engine s1(123), s2(123);
  for (int i = 0; i < 50; ++i) {
    CHECK(policy.sample(probs, s1) == policy.sample(probs, s2));
  }

  constexpr int kDraws = 100000;
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(probs.rows(), probs.cols());
  rng::Engine sampler(99);
  for (int i = 0; i < kDraws; ++i) {
    const std::vector<int> a = policy.sample(probs, sampler);
    for (std::size_t hd = 0; hd < a.size(); ++hd) {
      counts(static_cast<Eigen::Index>(hd), a[hd]) += 1.0;
    }
  }
  for (Eigen::Index hd = 0; hd < probs.rows(); ++hd) {
    for (Eigen::Index c = 0; c < probs.cols(); ++c) {
      const double p = probs(hd, c);
      const double sigma = std::sqrt(p * (1.0 - p) / kDraws);
      CHECK(std::abs(counts(hd, c) / kDraws - p) < 4.0 * sigma + 1e-4);
    }
  }
}

TEST_CASE("greedy returns the per-head argmax") {
  const PolicyConfig cfg = small_config();
  const TilePolicy policy(cfg, 1);
  Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(3, 8);
  probs.row(0) << 0.0, 0.9, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0;
  probs.row(1) << 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.3;
  probs.row(2) << 0.5, 0.4, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0;
  CHECK(policy.greedy(probs) == std::vector<int>{1, 7, 0});
}

TEST_CASE("the value head is the critic network's scalar output") {
  const PolicyConfig cfg = small_config();
  const TilePolicy policy(cfg, 21);
  rng::Engine eng(5);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd obs = random_vector(cfg.observation_size, eng);
    CHECK(policy.value(obs) == policy.critic().forward(obs)(0));
  }
}

TEST_CASE("checkpoints round-trip bit for bit") {
  const PolicyConfig cfg = small_config();
  TilePolicy policy(cfg, 31);
  rng::Engine eng(6);
  Eigen::VectorXd params = policy.actor().flatten();
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    params(i) += 0.25 * eng.gaussian();
  }
  policy.actor().unflatten(params);

  const std::string path = temp_path("roundtrip");
  policy.save(path);
  const TilePolicy loaded = TilePolicy::load(path);
  CHECK((loaded.actor().flatten() - policy.actor().flatten()).norm() == 0.0);
  CHECK((loaded.critic().flatten() - policy.critic().flatten()).norm() == 0.0);
  CHECK(loaded.config().heads == cfg.heads);
  CHECK(loaded.config().codec.levels == cfg.codec.levels);
  CHECK(loaded.config().codec.with_compression ==
        cfg.codec.with_compression);
  const Eigen::VectorXd obs =
      random_vector(cfg.observation_size, eng, -1.0, 1.0);
  CHECK((loaded.action_probs(obs) - policy.action_probs(obs)).norm() == 0.0);
  CHECK(loaded.value(obs) == policy.value(obs));
  std::remove(path.c_str());
}

TEST_CASE("corrupted checkpoints are rejected loudly") {
  const PolicyConfig cfg = small_config();
  const TilePolicy policy(cfg, 41);
  const std::string good = temp_path("good");
  policy.save(good);

  CHECK_THROWS_AS(TilePolicy::load("definitely_missing_checkpoint.txt"),
                  std::runtime_error);

  {
    std::ofstream out(temp_path("magic"));
    out << "some-other-format 1\n";
  }
  CHECK_THROWS_AS(TilePolicy::load(temp_path("magic")), std::runtime_error);

  {
    // Keep the header but drop the tail of the parameter list.
    std::ifstream in(good);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    std::ofstream out(temp_path("truncated"));
    out << text.substr(0, text.size() * 2 / 3);
  }
  CHECK_THROWS_AS(TilePolicy::load(temp_path("truncated")), std::runtime_error);

  {
    // Header promises a different architecture than the stored tensors.
    std::ifstream in(good);
    std::string line;
    std::getline(in, line);
    std::string rest((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    std::ofstream out(temp_path("mismatch"));
    out << "holostream-policy 1\n";
    const auto second_newline = rest.find('\n');
    out << "6 3 4 1 17\n";  // hidden width changed from 16 to 17
    out << rest.substr(second_newline + 1);
  }
  CHECK_THROWS_AS(TilePolicy::load(temp_path("mismatch")), std::runtime_error);

  for (const char* name : {"good", "magic", "truncated", "mismatch"}) {
    std::remove(temp_path(name).c_str());
  }
}
