#pragma once

// Small fully connected network: tanh hidden layers, linear or softmax head.
// Parameters live in one flat vector (layer by layer, weights column-major
// then biases) so optimizers and finite-difference checks treat them
// uniformly. Batches are column-per-sample.

#include <string>
#include <vector>

#include <Eigen/Core>

#include "symcanon/so3.hpp"

namespace symcanon {

enum class Loss { l1, l2 };
enum class Head { linear, softmax };

std::string to_string(Loss l);
Loss loss_from_string(const std::string& s);

class Mlp {
 public:
  /// Glorot-uniform weights, zero biases.
  Mlp(int inputs, std::vector<int> hidden, int outputs, Head head, Rng& rng);

  /// Same shape with every parameter zero.
  static Mlp zeros(int inputs, std::vector<int> hidden, int outputs, Head head);

  int inputs() const { return sizes_.front(); }
  int outputs() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  Head head() const { return head_; }

  const Eigen::VectorXd& params() const { return params_; }
  Eigen::VectorXd& params() { return params_; }

  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;
  int layers() const { return static_cast<int>(sizes_.size()) - 1; }

  /// Linear head: raw outputs. Softmax head: class probabilities.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;

  /// Mean loss over the batch and writes d(loss)/d(params) into grad.
  /// Linear head: per-coordinate L1 or L2, averaged over outputs and samples.
  /// Softmax head: cross-entropy against one-hot columns of y (loss ignored).
  double loss_and_grad(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, Loss loss,
                       Eigen::VectorXd& grad) const;

  double loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, Loss loss) const;

  /// Rebuilds a network from stored sizes and parameters.
  static Mlp from_params(std::vector<int> sizes, Head head, Eigen::VectorXd params);

 private:
  Mlp(std::vector<int> sizes, Head head);
  std::vector<int> sizes_;
  std::vector<Eigen::Index> offsets_;  // start of each layer's weights
  Head head_;
  Eigen::VectorXd params_;
};

class Adam {
 public:
  explicit Adam(Eigen::Index n, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr);

 private:
  Eigen::VectorXd m_, v_;
  double beta1_, beta2_, eps_;
  long long t_ = 0;
};

/// Largest relative discrepancy between backpropagated gradients and central
/// differences with step 1e-5, over every parameter, for the batch (x, y).
/// Relative error is |a - n| / max(|a|, |n|, 1e-6).
double gradient_check(const Mlp& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, Loss loss);

}  // namespace symcanon
