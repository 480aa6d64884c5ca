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

#include "cyclerl/q_network.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "reference_oracles.hpp"

namespace cyclerl {
namespace {

const std::vector<std::size_t> kSizes{6, 128, 32, 11};

Observation random_observation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Observation obs;
  for (auto& v : obs) v = unit(rng);
  return obs;
}

std::vector<Transition> random_batch(std::mt19937_64& rng, std::size_t n, std::size_t actions) {
  std::uniform_int_distribution<std::size_t> pick(0, actions - 1);
  std::normal_distribution<double> reward(0.0, 1.0);
  std::bernoulli_distribution terminal(0.2);
  std::vector<Transition> batch;
  for (std::size_t i = 0; i < n; ++i) {
    batch.push_back({random_observation(rng), pick(rng), reward(rng), random_observation(rng),
                     terminal(rng)});
  }
  return batch;
}

TEST(QNetwork, ShapesAndCounts) {
  const auto params = QNetworkParams::zeros(kSizes);
  EXPECT_EQ(params.layer_sizes(), kSizes);
  EXPECT_EQ(params.input_size(), 6u);
  EXPECT_EQ(params.output_size(), 11u);
  EXPECT_EQ(params.parameter_count(), 6u * 128 + 128 + 128 * 32 + 32 + 32 * 11 + 11);
  const std::vector<std::size_t> hidden{128, 32};
  EXPECT_EQ(network_sizes(6, hidden, 11), kSizes);
}

TEST(QNetwork, ZeroWeightsGiveZeroQ) {
  const auto params = QNetworkParams::zeros(kSizes);
  std::mt19937_64 rng(1);
  const auto obs = random_observation(rng);
  EXPECT_TRUE(q_forward(params, obs).isZero(0.0));
}

TEST(QNetwork, ForwardIsDeterministicAndMatchesReference) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto params = QNetworkParams::random(kSizes, rng);
    const auto obs = random_observation(rng);
    const auto a = q_forward(params, obs);
    const auto b = q_forward(params, obs);
    EXPECT_EQ(a, b);
    const auto ref = testing::reference_forward<long double>(params, {obs.begin(), obs.end()});
    ASSERT_EQ(static_cast<std::size_t>(a.size()), ref.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(a(i), static_cast<double>(ref[static_cast<std::size_t>(i)]), 1e-12);
    }
  }
}

TEST(QNetwork, RejectsBadInput) {
  const auto params = QNetworkParams::zeros(kSizes);
  const std::vector<double> short_obs(5, 0.0);
  EXPECT_THROW(q_forward(params, short_obs), std::invalid_argument);
  std::vector<double> nan_obs(6, 0.0);
  nan_obs[2] = std::nan("");
  EXPECT_THROW(q_forward(params, nan_obs), std::invalid_argument);
}

TEST(QNetwork, RandomInitIsFanInScaledAndSeeded) {
  std::mt19937_64 a(3);
  std::mt19937_64 b(3);
  const auto p = QNetworkParams::random(kSizes, a);
  EXPECT_TRUE(p == QNetworkParams::random(kSizes, b));
  EXPECT_TRUE(p.all_finite());
  for (const auto& layer : p.layers) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    EXPECT_LE(layer.weight.cwiseAbs().maxCoeff(), bound);
  }
}

TEST(BellmanLoss, FixedPointHasZeroLossAndGradient) {
  std::mt19937_64 rng(4);
  const auto params = QNetworkParams::random(kSizes, rng);
  auto batch = random_batch(rng, 16, 11);
  for (auto& tr : batch) {
    // Choose the reward so the Bellman target equals the current estimate.
    const double q = q_forward(params, tr.state)(static_cast<Eigen::Index>(tr.action));
    const double next = tr.terminal ? 0.0 : 0.9 * q_forward(params, tr.next_state).maxCoeff();
    tr.reward = q - next;
  }
  const auto out = bellman_loss_grad(params, params, batch, 0.9);
  EXPECT_NEAR(out.loss, 0.0, 1e-24);
  for (const auto& layer : out.gradient.layers) {
    EXPECT_LT(layer.weight.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(layer.bias.cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(BellmanLoss, SingleLayerClosedForm) {
  std::mt19937_64 rng(5);
  const std::vector<std::size_t> sizes{6, 3};
  const auto params = QNetworkParams::random(sizes, rng);
  const auto target = QNetworkParams::random(sizes, rng);
  Transition tr{random_observation(rng), 1, 0.7, random_observation(rng), false};
  const double gamma = 0.95;

  Eigen::VectorXd s(6);
  Eigen::VectorXd s_next(6);
  for (int i = 0; i < 6; ++i) {
    s(i) = tr.state[i];
    s_next(i) = tr.next_state[i];
  }
  const Eigen::VectorXd q = params.layers[0].weight * s + params.layers[0].bias;
  const Eigen::VectorXd q_next = target.layers[0].weight * s_next + target.layers[0].bias;
  const double error = tr.reward + gamma * q_next.maxCoeff() - q(1);

  const std::vector<Transition> batch{tr};
  const auto out = bellman_loss_grad(params, target, batch, gamma);
  EXPECT_NEAR(out.loss, error * error, 1e-14);
  for (Eigen::Index row = 0; row < 3; ++row) {
    const double factor = row == 1 ? -2.0 * error : 0.0;
    EXPECT_NEAR(out.gradient.layers[0].bias(row), factor, 1e-14);
    for (Eigen::Index col = 0; col < 6; ++col) {
      EXPECT_NEAR(out.gradient.layers[0].weight(row, col), factor * s(col), 1e-14);
    }
  }

  tr.terminal = true;
  const std::vector<Transition> terminal{tr};
  EXPECT_NEAR(bellman_loss_grad(params, target, terminal, gamma).loss,
              (tr.reward - q(1)) * (tr.reward - q(1)), 1e-14);
}

TEST(BellmanLoss, MatchesFiniteDifferences) {
  std::mt19937_64 rng(6);
  const std::vector<std::size_t> sizes{6, 16, 8, 4};
  for (int trial = 0; trial < 5; ++trial) {
    const auto params = QNetworkParams::random(sizes, rng);
    const auto target = QNetworkParams::random(sizes, rng);
    const auto batch = random_batch(rng, 12, 4);
    const auto out = bellman_loss_grad(params, target, batch, 0.99);
    EXPECT_NEAR(out.loss, static_cast<double>(testing::reference_bellman_loss(params, target, batch, 0.99)),
                1e-12 * std::max(1.0, out.loss));
    const auto check = testing::check_gradient(params, target, batch, 0.99, out.gradient);
    EXPECT_GT(check.checked, params.parameter_count() / 2);
    EXPECT_LT(check.max_relative_error, 1e-4);
  }
}

TEST(BellmanLoss, GradientCheckDetectsCorruption) {
  std::mt19937_64 rng(60);
  const std::vector<std::size_t> sizes{6, 16, 8, 4};
  const auto params = QNetworkParams::random(sizes, rng);
  const auto batch = random_batch(rng, 12, 4);
  auto gradient = bellman_loss_grad(params, params, batch, 1.0).gradient;
  for (std::size_t l = 0; l < gradient.layers.size(); ++l) {
    auto corrupted = gradient;
    corrupted.layers[l].weight(0, 0) += 1e-3;
    EXPECT_GT(testing::check_gradient(params, params, batch, 1.0, corrupted).max_relative_error, 1e-4)
        << "layer " << l;
  }
}

TEST(BellmanLoss, Errors) {
  const auto params = QNetworkParams::zeros(kSizes);
  EXPECT_THROW(bellman_loss_grad(params, params, std::vector<Transition>{}, 1.0),
               std::invalid_argument);
  const auto other = QNetworkParams::zeros(std::vector<std::size_t>{6, 64, 32, 11});
  const std::vector<Transition> one(1);
  EXPECT_THROW(bellman_loss_grad(params, other, one, 1.0), std::invalid_argument);
  std::vector<Transition> bad(1);
  bad[0].action = 11;
  EXPECT_THROW(bellman_loss_grad(params, params, bad, 1.0), std::invalid_argument);
}

TEST(BellmanLoss, GradientStepOnLastLayerDescends) {
  std::mt19937_64 rng(7);
  const std::vector<std::size_t> sizes{6, 32, 16, 5};
  auto params = QNetworkParams::random(sizes, rng);
  const auto target = params;
  const auto batch = random_batch(rng, 64, 5);
  double previous = bellman_loss_grad(params, target, batch, 1.0).loss;
  for (int i = 0; i < 200; ++i) {
    const auto out = bellman_loss_grad(params, target, batch, 1.0);
    params.layers.back().weight -= 1e-3 * out.gradient.layers.back().weight;
    params.layers.back().bias -= 1e-3 * out.gradient.layers.back().bias;
    const double loss = bellman_loss_grad(params, target, batch, 1.0).loss;
    EXPECT_LE(loss, previous);
    previous = loss;
  }
}

TEST(Adam, ZeroGradientKeepsParamsAndDecaysMoments) {
  std::mt19937_64 rng(8);
  const std::vector<std::size_t> sizes{6, 4, 2};
  auto params = QNetworkParams::random(sizes, rng);
  AdamOptimizer adam(params);
  auto gradient = QNetworkParams::random(sizes, rng);
  adam.update(params, gradient, 1e-3);
  const auto snapshot = params;
  const double m_before = adam.first_moment().layers[0].weight.cwiseAbs().sum();
  const double v_before = adam.second_moment().layers[0].weight.cwiseAbs().sum();
  const auto zero = QNetworkParams::zeros(sizes);
  adam.update(params, zero, 1e-3);
  // The bias-corrected first moment still moves the parameters; with both
  // moments starting at zero the parameters stay fixed.
  EXPECT_NEAR(adam.first_moment().layers[0].weight.cwiseAbs().sum(), 0.9 * m_before, 1e-12);
  EXPECT_NEAR(adam.second_moment().layers[0].weight.cwiseAbs().sum(), 0.999 * v_before, 1e-12);

  auto fresh = snapshot;
  AdamOptimizer idle(fresh);
  for (int i = 0; i < 10; ++i) idle.update(fresh, zero, 1e-3);
  EXPECT_TRUE(fresh == snapshot);
  EXPECT_EQ(idle.steps(), 10u);
}

TEST(Adam, ConstantGradientStepTendsToLearningRate) {
  const std::vector<std::size_t> sizes{6, 2};
  auto params = QNetworkParams::zeros(sizes);
  auto gradient = QNetworkParams::zeros(sizes);
  gradient.layers[0].weight.setConstant(0.37);
  gradient.layers[0].bias.setConstant(-2.5);
  AdamOptimizer adam(params);
  const double lr = 1e-3;
  for (int i = 0; i < 999; ++i) adam.update(params, gradient, lr);
  const auto before = params;
  adam.update(params, gradient, lr);
  const Eigen::MatrixXd dw = params.layers[0].weight - before.layers[0].weight;
  const Eigen::VectorXd db = params.layers[0].bias - before.layers[0].bias;
  EXPECT_NEAR(dw(0, 0), -lr, 1e-9);
  EXPECT_NEAR(db(0), lr, 1e-9);
}

TEST(Adam, Deterministic) {
  const auto run = [] {
    std::mt19937_64 rng(9);
    const std::vector<std::size_t> sizes{6, 8, 3};
    auto params = QNetworkParams::random(sizes, rng);
    const auto target = params;
    AdamOptimizer adam(params);
    for (int i = 0; i < 50; ++i) {
      const auto batch = random_batch(rng, 8, 3);
      adam.update(params, bellman_loss_grad(params, target, batch, 1.0).gradient, 1e-3);
    }
    return params;
  };
  EXPECT_TRUE(run() == run());
}

TEST(SelectAction, GreedyAndTies) {
  std::mt19937_64 rng(10);
  const auto zero = QNetworkParams::zeros(kSizes);
  const auto obs = random_observation(rng);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(select_action(zero, obs, 0.0, rng), 0u);

  auto biased = QNetworkParams::zeros(kSizes);
  biased.layers.back().bias(7) = 1.0;
  std::mt19937_64 copy = rng;
  EXPECT_EQ(select_action(biased, obs, 0.0, rng), 7u);
  EXPECT_EQ(rng(), copy());  // greedy selection draws no randomness
  EXPECT_THROW(select_action(zero, obs, 1.5, rng), std::invalid_argument);
}

TEST(SelectAction, FullyRandomIsUniform) {
  std::mt19937_64 rng(11);
  auto params = QNetworkParams::zeros(kSizes);
  params.layers.back().bias(3) = 5.0;
  const auto obs = random_observation(rng);
  const int draws = 100000;
  std::vector<int> counts(11, 0);
  for (int i = 0; i < draws; ++i) ++counts[select_action(params, obs, 1.0, rng)];
  const double p = 1.0 / 11.0;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (int c : counts) EXPECT_LT(std::abs(c - draws * p), 3.0 * sigma);
}

}  // namespace
}  // namespace cyclerl
