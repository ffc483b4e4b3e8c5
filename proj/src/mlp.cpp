#include "symcanon/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "symcanon/error.hpp"

namespace symcanon {

std::string to_string(Loss l) { return l == Loss::l1 ? "l1" : "l2"; }

Loss loss_from_string(const std::string& s) {
  if (s == "l1") return Loss::l1;
  if (s == "l2") return Loss::l2;
  throw InvalidArgument("loss must be \"l1\" or \"l2\", got \"" + s + "\"");
}

Mlp::Mlp(std::vector<int> sizes, Head head) : sizes_(std::move(sizes)), head_(head) {
  if (sizes_.size() < 2) throw InvalidArgument("network needs an input and an output layer");
  for (int s : sizes_) {
    if (s < 1) throw InvalidArgument("layer sizes must be positive");
  }
  if (head_ == Head::softmax && sizes_.back() < 2) throw InvalidArgument("softmax head needs >= 2 classes");
  Eigen::Index n = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(n);
    n += static_cast<Eigen::Index>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
  params_ = Eigen::VectorXd::Zero(n);
}

Mlp::Mlp(int inputs, std::vector<int> hidden, int outputs, Head head, Rng& rng)
    : Mlp(zeros(inputs, std::move(hidden), outputs, head)) {
  for (int l = 0; l < layers(); ++l) {
    const double lim = std::sqrt(6.0 / (sizes_[l] + sizes_[l + 1]));
    std::uniform_real_distribution<double> u(-lim, lim);
    const Eigen::Index nw = static_cast<Eigen::Index>(sizes_[l]) * sizes_[l + 1];
    for (Eigen::Index i = 0; i < nw; ++i) params_[offsets_[l] + i] = u(rng);
  }
}

Mlp Mlp::zeros(int inputs, std::vector<int> hidden, int outputs, Head head) {
  std::vector<int> sizes{inputs};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(outputs);
  return Mlp(std::move(sizes), head);
}

Mlp Mlp::from_params(std::vector<int> sizes, Head head, Eigen::VectorXd params) {
  Mlp net(std::move(sizes), head);
  if (params.size() != net.params_.size()) {
    throw InvalidArgument("parameter count " + std::to_string(params.size()) + " does not match layer sizes (" +
                          std::to_string(net.params_.size()) + ")");
  }
  if (!params.allFinite()) throw InvalidArgument("network parameters must be finite");
  net.params_ = std::move(params);
  return net;
}

Eigen::Map<const Eigen::MatrixXd> Mlp::weight(int l) const {
  return {params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(int l) const {
  return {params_.data() + offsets_[l] + static_cast<Eigen::Index>(sizes_[l]) * sizes_[l + 1], sizes_[l + 1]};
}

namespace {

void softmax_inplace(Eigen::MatrixXd& z) {
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    auto col = z.col(c);
    col.array() -= col.maxCoeff();
    col = col.array().exp().matrix();
    col /= col.sum();
  }
}

}  // namespace

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  if (x.rows() != inputs()) throw InvalidArgument("input width does not match the network");
  Eigen::MatrixXd a = x;
  for (int l = 0; l < layers(); ++l) {
    Eigen::MatrixXd z = weight(l) * a;
    z.colwise() += bias(l);
    if (l + 1 < layers()) {
      a = z.array().tanh().matrix();
    } else {
      a = std::move(z);
    }
  }
  if (head_ == Head::softmax) softmax_inplace(a);
  return a;
}

double Mlp::loss_and_grad(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, Loss loss,
                          Eigen::VectorXd& grad) const {
  if (x.rows() != inputs() || y.rows() != outputs() || x.cols() != y.cols() || x.cols() == 0) {
    throw InvalidArgument("batch shape does not match the network");
  }
  const double n = static_cast<double>(x.cols());
  std::vector<Eigen::MatrixXd> acts{x};
  acts.reserve(layers() + 1);
  for (int l = 0; l < layers(); ++l) {
    Eigen::MatrixXd z = weight(l) * acts.back();
    z.colwise() += bias(l);
    if (l + 1 < layers()) z = z.array().tanh().matrix();
    acts.push_back(std::move(z));
  }

  Eigen::MatrixXd& out = acts.back();
  Eigen::MatrixXd dz;
  double value = 0.0;
  if (head_ == Head::softmax) {
    Eigen::MatrixXd logp = out;
    for (Eigen::Index c = 0; c < logp.cols(); ++c) {
      auto col = logp.col(c);
      const double mx = col.maxCoeff();
      col.array() -= mx + std::log((col.array() - mx).exp().sum());
    }
    value = -(y.array() * logp.array()).sum() / n;
    dz = (logp.array().exp().matrix() - y) / n;
  } else {
    const Eigen::MatrixXd diff = out - y;
    const double m = n * outputs();
    if (loss == Loss::l2) {
      value = diff.squaredNorm() / m;
      dz = 2.0 * diff / m;
    } else {
      value = diff.cwiseAbs().sum() / m;
      dz = diff.unaryExpr([](double d) { return (d > 0) - (d < 0) + 0.0; }) / m;
    }
  }

  grad.resize(params_.size());
  for (int l = layers() - 1; l >= 0; --l) {
    const Eigen::Index nw = static_cast<Eigen::Index>(sizes_[l]) * sizes_[l + 1];
    Eigen::Map<Eigen::MatrixXd>(grad.data() + offsets_[l], sizes_[l + 1], sizes_[l]) =
        dz * acts[l].transpose();
    grad.segment(offsets_[l] + nw, sizes_[l + 1]) = dz.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd da = weight(l).transpose() * dz;
      dz = da.array() * (1.0 - acts[l].array().square());
    }
  }
  return value;
}

double Mlp::loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, Loss loss) const {
  Eigen::VectorXd g;
  return loss_and_grad(x, y, loss, g);
}

Adam::Adam(Eigen::Index n, double beta1, double beta2, double eps)
    : m_(Eigen::VectorXd::Zero(n)), v_(Eigen::VectorXd::Zero(n)), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr) {
  ++t_;
  m_ = beta1_ * m_ + (1 - beta1_) * grad;
  v_ = beta2_ * v_ + (1 - beta2_) * grad.cwiseAbs2();
  const double c1 = 1 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

double gradient_check(const Mlp& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, Loss loss) {
  constexpr double h = 1e-5;
  Eigen::VectorXd analytic;
  net.loss_and_grad(x, y, loss, analytic);
  Mlp probe = net;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < probe.params().size(); ++i) {
    const double keep = probe.params()[i];
    probe.params()[i] = keep + h;
    const double up = probe.loss(x, y, loss);
    probe.params()[i] = keep - h;
    const double down = probe.loss(x, y, loss);
    probe.params()[i] = keep;
    const double numeric = (up - down) / (2 * h);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace symcanon
