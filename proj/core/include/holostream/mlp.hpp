#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace holostream {

// Fully-connected net with two tanh hidden layers and a linear output,
// trained by explicit reverse-mode differentiation (no autodiff dependency).
// Parameters are exposed both as matrices (for forward/backward) and as one
// flat vector (for optimizers, checkpoints and finite-difference checks).
class DenseNet {
 public:
  DenseNet() = default;

  // Xavier-uniform hidden layers; the output layer is zeroed when
  // `zero_output` is set so downstream softmax heads start exactly uniform.
  static DenseNet create(int inputs, int hidden, int outputs,
                         std::uint64_t seed, bool zero_output);

  // Gradient accumulator with matching shapes.
  static DenseNet zeros_like(const DenseNet& other);

  int inputs() const { return static_cast<int>(w1_.cols()); }
  int hidden() const { return static_cast<int>(w1_.rows()); }
  int outputs() const { return static_cast<int>(w3_.rows()); }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;

  // Post-activation values retained for the backward pass.
  struct Trace {
    Eigen::VectorXd x, h1, h2;
  };
  Eigen::VectorXd forward(const Eigen::VectorXd& x, Trace& trace) const;

  // Accumulates d(loss)/d(params) into `grad` given d(loss)/d(output).
  void backward(const Trace& trace, const Eigen::VectorXd& d_out,
                DenseNet& grad) const;

  int param_count() const;
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& params);

  void set_zero();
  void scale(double factor);
  double squared_norm() const;

 private:
  Eigen::MatrixXd w1_, w2_, w3_;
  Eigen::VectorXd b1_, b2_, b3_;
};

// Adam on a flat parameter vector (decoupled from any network structure).
class AdamOptimizer {
 public:
  AdamOptimizer(int dim, double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

  double learning_rate() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  Eigen::VectorXd m_, v_;
};

}  // namespace holostream
