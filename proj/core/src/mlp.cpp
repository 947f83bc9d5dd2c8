#include "holostream/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "holostream/rng.hpp"

namespace holostream {

namespace {

Eigen::MatrixXd xavier(int rows, int cols, rng::Engine& eng) {
  const double bound = std::sqrt(6.0 / (rows + cols));
  Eigen::MatrixXd w(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      w(r, c) = eng.uniform(-bound, bound);
    }
  }
  return w;
}

}  // namespace

DenseNet DenseNet::create(int inputs, int hidden, int outputs,
                          std::uint64_t seed, bool zero_output) {
  if (inputs < 1 || hidden < 1 || outputs < 1) {
    throw std::invalid_argument("DenseNet: layer sizes must be >= 1");
  }
  rng::Engine eng(seed);
  DenseNet net;
  net.w1_ = xavier(hidden, inputs, eng);
  net.b1_ = Eigen::VectorXd::Zero(hidden);
  net.w2_ = xavier(hidden, hidden, eng);
  net.b2_ = Eigen::VectorXd::Zero(hidden);
  net.w3_ = zero_output ? Eigen::MatrixXd::Zero(outputs, hidden)
                        : xavier(outputs, hidden, eng);
  net.b3_ = Eigen::VectorXd::Zero(outputs);
  return net;
}

DenseNet DenseNet::zeros_like(const DenseNet& other) {
  DenseNet net = other;
  net.set_zero();
  return net;
}

Eigen::VectorXd DenseNet::forward(const Eigen::VectorXd& x) const {
  Trace trace;
  return forward(x, trace);
}

Eigen::VectorXd DenseNet::forward(const Eigen::VectorXd& x,
                                  Trace& trace) const {
  if (x.size() != w1_.cols()) {
    throw std::invalid_argument("DenseNet: input size mismatch");
  }
  trace.x = x;
  trace.h1 = (w1_ * x + b1_).array().tanh();
  trace.h2 = (w2_ * trace.h1 + b2_).array().tanh();
  return w3_ * trace.h2 + b3_;
}

void DenseNet::backward(const Trace& trace, const Eigen::VectorXd& d_out,
                        DenseNet& grad) const {
  grad.w3_.noalias() += d_out * trace.h2.transpose();
  grad.b3_ += d_out;
  const Eigen::VectorXd da2 =
      (w3_.transpose() * d_out).cwiseProduct(
          (1.0 - trace.h2.array().square()).matrix());
  grad.w2_.noalias() += da2 * trace.h1.transpose();
  grad.b2_ += da2;
  const Eigen::VectorXd da1 =
      (w2_.transpose() * da2).cwiseProduct(
          (1.0 - trace.h1.array().square()).matrix());
  grad.w1_.noalias() += da1 * trace.x.transpose();
  grad.b1_ += da1;
}

int DenseNet::param_count() const {
  return static_cast<int>(w1_.size() + b1_.size() + w2_.size() + b2_.size() +
                          w3_.size() + b3_.size());
}

Eigen::VectorXd DenseNet::flatten() const {
  Eigen::VectorXd out(param_count());
  Eigen::Index pos = 0;
  const auto put = [&](const auto& block) {
    out.segment(pos, block.size()) =
        Eigen::Map<const Eigen::VectorXd>(block.data(), block.size());
    pos += block.size();
  };
  put(w1_); put(b1_); put(w2_); put(b2_); put(w3_); put(b3_);
  return out;
}

void DenseNet::unflatten(const Eigen::VectorXd& params) {
  if (params.size() != param_count()) {
    throw std::invalid_argument("DenseNet: parameter vector size mismatch");
  }
  Eigen::Index pos = 0;
  const auto take = [&](auto& block) {
    Eigen::Map<Eigen::VectorXd>(block.data(), block.size()) =
        params.segment(pos, block.size());
    pos += block.size();
  };
  take(w1_); take(b1_); take(w2_); take(b2_); take(w3_); take(b3_);
}

void DenseNet::set_zero() {
  w1_.setZero(); b1_.setZero();
  w2_.setZero(); b2_.setZero();
  w3_.setZero(); b3_.setZero();
}

void DenseNet::scale(double factor) {
  w1_ *= factor; b1_ *= factor;
  w2_ *= factor; b2_ *= factor;
  w3_ *= factor; b3_ *= factor;
}

double DenseNet::squared_norm() const {
  return w1_.squaredNorm() + b1_.squaredNorm() + w2_.squaredNorm() +
         b2_.squaredNorm() + w3_.squaredNorm() + b3_.squaredNorm();
}

AdamOptimizer::AdamOptimizer(int dim, double lr, double beta1, double beta2,
                             double eps)
    : lr_(lr),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(Eigen::VectorXd::Zero(dim)),
      v_(Eigen::VectorXd::Zero(dim)) {
  if (dim < 1 || !(lr > 0.0)) {
    throw std::invalid_argument("AdamOptimizer: bad dimension or rate");
  }
}

void AdamOptimizer::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw std::invalid_argument("AdamOptimizer: size mismatch");
  }
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_.array().matrix() + (1.0 - beta2_) * grad.array().square().matrix();
  const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / bias1) /
                    ((v_.array() / bias2).sqrt() + eps_);
}

}  // namespace holostream
