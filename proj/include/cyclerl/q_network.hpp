// Copyright 2026 The cyclerl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Fully connected Q-network (ReLU hidden layers, linear head), its Bellman
// loss gradient against a frozen target copy, and an Adam optimizer.

#ifndef CYCLERL_Q_NETWORK_HPP_
#define CYCLERL_Q_NETWORK_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclerl/battery_env.hpp"

namespace cyclerl {

struct DenseLayer {
  Eigen::MatrixXd weight;  // outputs x inputs
  Eigen::VectorXd bias;

  friend bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.weight.rows() == b.weight.rows() && a.weight.cols() == b.weight.cols() &&
           a.bias.size() == b.bias.size() && a.weight == b.weight && a.bias == b.bias;
  }
};

/// Weights and biases of an MLP. Layer sizes are {input, hidden..., output}.
struct QNetworkParams {
  std::vector<DenseLayer> layers;

  static QNetworkParams zeros(std::span<const std::size_t> sizes) {
    if (sizes.size() < 2) {
      throw std::invalid_argument("QNetworkParams: need at least input and output sizes");
    }
    QNetworkParams params;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      if (sizes[l] == 0 || sizes[l + 1] == 0) {
        throw std::invalid_argument("QNetworkParams: layer sizes must be > 0");
      }
      const auto in = static_cast<Eigen::Index>(sizes[l]);
      const auto out = static_cast<Eigen::Index>(sizes[l + 1]);
      params.layers.push_back({Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
    }
    return params;
  }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  template <class Rng>
  static QNetworkParams random(std::span<const std::size_t> sizes, Rng& rng) {
    QNetworkParams params = zeros(sizes);
    for (auto& layer : params.layers) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
      std::uniform_real_distribution<double> uniform(-bound, bound);
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) {
        for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
          layer.weight(i, j) = uniform(rng);
        }
      }
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = uniform(rng);
    }
    return params;
  }

  std::vector<std::size_t> layer_sizes() const {
    std::vector<std::size_t> sizes;
    if (layers.empty()) return sizes;
    sizes.push_back(static_cast<std::size_t>(layers.front().weight.cols()));
    for (const auto& layer : layers) {
      sizes.push_back(static_cast<std::size_t>(layer.weight.rows()));
    }
    return sizes;
  }

  std::size_t input_size() const {
    return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().weight.cols());
  }
  std::size_t output_size() const {
    return layers.empty() ? 0 : static_cast<std::size_t>(layers.back().weight.rows());
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) {
      n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
    }
    return n;
  }

  bool all_finite() const {
    for (const auto& layer : layers) {
      if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
    }
    return true;
  }

  bool same_shape(const QNetworkParams& other) const {
    return layer_sizes() == other.layer_sizes();
  }

  friend bool operator==(const QNetworkParams&, const QNetworkParams&) = default;
};

/// The frozen copy used for bootstrap targets.
using TargetParams = QNetworkParams;

inline std::vector<std::size_t> network_sizes(std::size_t inputs,
                                              std::span<const std::size_t> hidden,
                                              std::size_t outputs) {
  std::vector<std::size_t> sizes{inputs};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(outputs);
  return sizes;
}

/// Batched forward pass; `inputs` holds one observation per column.
inline Eigen::MatrixXd q_forward_batch(const QNetworkParams& params,
                                       const Eigen::MatrixXd& inputs) {
  if (params.layers.empty() ||
      inputs.rows() != static_cast<Eigen::Index>(params.input_size())) {
    throw std::invalid_argument("q_forward: observation size does not match network input");
  }
  Eigen::MatrixXd activation = inputs;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    Eigen::MatrixXd z = layer.weight * activation;
    z.colwise() += layer.bias;
    if (l + 1 < params.layers.size()) z = z.cwiseMax(0.0);
    activation = std::move(z);
  }
  return activation;
}

inline Eigen::VectorXd q_forward(const QNetworkParams& params,
                                 std::span<const double> observation) {
  Eigen::MatrixXd input(static_cast<Eigen::Index>(observation.size()), 1);
  for (std::size_t i = 0; i < observation.size(); ++i) {
    input(static_cast<Eigen::Index>(i), 0) = observation[i];
    if (!std::isfinite(observation[i])) {
      throw std::invalid_argument("q_forward: non-finite observation");
    }
  }
  return q_forward_batch(params, input).col(0);
}

/// Index of the largest entry; ties go to the lowest index.
inline std::size_t argmax(const Eigen::VectorXd& values) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) > values(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
  }
  return best;
}

struct Transition {
  Observation state{};
  std::size_t action = 0;
  double reward = 0.0;
  Observation next_state{};
  bool terminal = false;
};

struct LossAndGradient {
  double loss = 0.0;
  QNetworkParams gradient;
};

/// Mean squared Bellman error over the batch and its gradient with respect
/// to `params`. Targets r + gamma * max_a' Q(s', a'; target) are constants;
/// terminal transitions use r alone.
inline LossAndGradient bellman_loss_grad(const QNetworkParams& params,
                                         const TargetParams& target,
                                         std::span<const Transition> batch,
                                         double gamma) {
  if (batch.empty()) throw std::invalid_argument("bellman_loss_grad: empty batch");
  if (!params.same_shape(target)) {
    throw std::invalid_argument("bellman_loss_grad: target shape differs from params");
  }
  const auto n = static_cast<Eigen::Index>(batch.size());
  const auto in = static_cast<Eigen::Index>(params.input_size());
  if (in != static_cast<Eigen::Index>(kObservationSize)) {
    throw std::invalid_argument("bellman_loss_grad: network input must match observation size");
  }
  Eigen::MatrixXd states(in, n);
  Eigen::MatrixXd next_states(in, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& tr = batch[static_cast<std::size_t>(j)];
    if (tr.action >= params.output_size()) {
      throw std::invalid_argument("bellman_loss_grad: action index out of range");
    }
    for (Eigen::Index i = 0; i < in; ++i) {
      states(i, j) = tr.state[static_cast<std::size_t>(i)];
      next_states(i, j) = tr.next_state[static_cast<std::size_t>(i)];
    }
  }

  const Eigen::MatrixXd next_q = q_forward_batch(target, next_states);

  // Forward pass keeping each layer's input activation.
  const std::size_t depth = params.layers.size();
  std::vector<Eigen::MatrixXd> activations;
  activations.reserve(depth + 1);
  activations.push_back(states);
  for (std::size_t l = 0; l < depth; ++l) {
    const auto& layer = params.layers[l];
    Eigen::MatrixXd z = layer.weight * activations.back();
    z.colwise() += layer.bias;
    if (l + 1 < depth) z = z.cwiseMax(0.0);
    activations.push_back(std::move(z));
  }
  const Eigen::MatrixXd& q = activations.back();

  LossAndGradient out;
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(q.rows(), n);
  const double scale = 1.0 / static_cast<double>(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& tr = batch[static_cast<std::size_t>(j)];
    const double bootstrap = tr.terminal ? 0.0 : gamma * next_q.col(j).maxCoeff();
    const auto a = static_cast<Eigen::Index>(tr.action);
    const double error = tr.reward + bootstrap - q(a, j);
    out.loss += error * error * scale;
    delta(a, j) = -2.0 * error * scale;
  }

  out.gradient.layers.resize(depth);
  for (std::size_t l = depth; l-- > 0;) {
    const auto& layer = params.layers[l];
    auto& grad = out.gradient.layers[l];
    grad.weight = delta * activations[l].transpose();
    grad.bias = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = layer.weight.transpose() * delta;
      // ReLU derivative: activations[l] is the post-ReLU output of layer l-1.
      delta = back.cwiseProduct((activations[l].array() > 0.0).cast<double>().matrix());
    }
  }
  return out;
}

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(const QNetworkParams& shape, AdamConfig config = {})
      : config_(config),
        first_(QNetworkParams::zeros(shape.layer_sizes())),
        second_(QNetworkParams::zeros(shape.layer_sizes())) {}

  void update(QNetworkParams& params, const QNetworkParams& gradient,
              double learning_rate) {
    if (!params.same_shape(gradient) || !params.same_shape(first_)) {
      throw std::invalid_argument("AdamOptimizer: shape mismatch");
    }
    ++steps_;
    const double correction1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
    const double correction2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
      apply(params.layers[l].weight, gradient.layers[l].weight, first_.layers[l].weight,
            second_.layers[l].weight, learning_rate, correction1, correction2);
      apply(params.layers[l].bias, gradient.layers[l].bias, first_.layers[l].bias,
            second_.layers[l].bias, learning_rate, correction1, correction2);
    }
  }

  std::size_t steps() const { return steps_; }
  const QNetworkParams& first_moment() const { return first_; }
  const QNetworkParams& second_moment() const { return second_; }

 private:
  template <class Matrix>
  void apply(Matrix& value, const Matrix& grad, Matrix& m, Matrix& v, double lr,
             double c1, double c2) const {
    m = config_.beta1 * m + (1.0 - config_.beta1) * grad;
    v = config_.beta2 * v + (1.0 - config_.beta2) * grad.cwiseProduct(grad);
    value.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + config_.epsilon);
  }

  AdamConfig config_;
  QNetworkParams first_;
  QNetworkParams second_;
  std::size_t steps_ = 0;
};

/// Uniform random action with probability epsilon, otherwise greedy.
template <class Rng>
std::size_t select_action(const QNetworkParams& params,
                          std::span<const double> observation, double epsilon,
                          Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("select_action: epsilon must lie in [0, 1]");
  }
  if (epsilon > 0.0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) {
      std::uniform_int_distribution<std::size_t> pick(0, params.output_size() - 1);
      return pick(rng);
    }
  }
  return argmax(q_forward(params, observation));
}

}  // namespace cyclerl

#endif  // CYCLERL_Q_NETWORK_HPP_
