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

#include "cyclerl/dqn.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>
#include <set>
#include <vector>

#include "cyclerl/replay_buffer.hpp"

namespace cyclerl {
namespace {

// One state, two arms paying 0 and 1; every episode is a single pull.
struct BanditEnv {
  std::size_t num_actions() const { return 2; }
  Observation observe() const { return {0.5, 0.0, 0.5, 0.5, 0.5, 0.5}; }
  StepResult step(std::size_t action) {
    ++pulls;
    StepResult r;
    r.observation = observe();
    r.reward = make_reward(action == 1 ? -1.0 : 0.0, 0.0, 0.0);
    r.terminal = true;
    return r;
  }
  std::size_t pulls = 0;
};

// Never terminates on its own; counts steps.
struct CounterEnv {
  std::size_t num_actions() const { return 3; }
  Observation observe() const {
    const double x = static_cast<double>(t % 7) / 7.0;
    return {x, -x, 0.5, 0.5, 0.5, 0.5};
  }
  StepResult step(std::size_t action) {
    ++t;
    StepResult r;
    r.observation = observe();
    r.reward = make_reward(0.1 * static_cast<double>(action), 0.0, 0.0);
    return r;
  }
  std::size_t t = 0;
};

const auto kNoop = [](auto&, std::size_t) {};
const auto kNoopEnd = [](auto&, std::size_t, EpisodeTrace&) {};

TrainConfig small_config() {
  TrainConfig c;
  c.hidden = {16, 8};
  c.batch_size = 8;
  c.target_interval = 25;
  c.learning_rate = 1e-2;
  c.seed = 3;
  return c;
}

TEST(Train, BufferHoldsEveryTransition) {
  CounterEnv env;
  TrainConfig c = small_config();
  c.episodes = 1;
  c.steps_per_episode = 10;
  c.epsilon_init = 1.0;
  c.kappa = 0.999;
  c.batch_size = 64;
  const auto result = train(env, c, kNoop, kNoopEnd);
  EXPECT_EQ(result.replay_size, 10u);
  EXPECT_EQ(result.updates, 0u);  // buffer never reached one batch
  EXPECT_EQ(env.t, 10u);
  ASSERT_EQ(result.trace.size(), 1u);
}

TEST(Train, BanditLearnsRewardingArm) {
  BanditEnv env;
  TrainConfig c = small_config();
  c.episodes = 2000;
  c.steps_per_episode = 1;
  const auto result = train(env, c, kNoop, kNoopEnd);
  EXPECT_EQ(env.pulls, 2000u);
  const auto q = q_forward(result.params, env.observe());
  EXPECT_EQ(argmax(q), 1u);
  EXPECT_NEAR(q(1), 1.0, 0.1);
  EXPECT_NEAR(q(0), 0.0, 0.1);
}

TEST(Train, EpsilonSchedule) {
  CounterEnv env;
  TrainConfig c = small_config();
  c.episodes = 4;
  c.steps_per_episode = 10;
  c.epsilon_init = 0.8;
  c.kappa = 0.9;
  c.epsilon_floor = 0.05;
  const auto result = train(env, c, kNoop, kNoopEnd);
  double previous = 1.0;
  for (const auto& row : result.trace) {
    const double expected = std::max(0.8 * std::pow(0.9, 10.0 * (row.episode + 1)), 0.05);
    EXPECT_NEAR(row.epsilon, expected, 1e-12);
    EXPECT_LE(row.epsilon, previous);
    previous = row.epsilon;
  }
  EXPECT_EQ(result.final_epsilon, 0.05);
}

TEST(Train, AutomaticKappaReachesFloorHalfway) {
  TrainConfig c;
  c.episodes = 10;
  c.steps_per_episode = 100;
  const double kappa = c.effective_kappa();
  EXPECT_NEAR(std::pow(kappa, 500.0), c.epsilon_floor / c.epsilon_init, 1e-12);
  EXPECT_EQ(c.effective_learn_start(), c.batch_size);
}

TEST(Train, TargetIsSnapshotAtLastSync) {
  TrainConfig c = small_config();
  c.kappa = 0.95;
  c.steps_per_episode = 10;
  c.episodes = 5;  // 50 steps: last sync at step 50
  CounterEnv env_a;
  const auto a = train(env_a, c, kNoop, kNoopEnd);
  EXPECT_TRUE(a.target == a.params);

  c.episodes = 6;  // 60 steps: target still from step 50
  CounterEnv env_b;
  const auto b = train(env_b, c, kNoop, kNoopEnd);
  EXPECT_TRUE(b.target == a.params);
  EXPECT_FALSE(b.params == b.target);
}

TEST(Train, SeededRunsAreIdentical) {
  TrainConfig c = small_config();
  c.episodes = 3;
  c.steps_per_episode = 20;
  CounterEnv e1;
  CounterEnv e2;
  const auto a = train(e1, c, kNoop, kNoopEnd);
  const auto b = train(e2, c, kNoop, kNoopEnd);
  EXPECT_TRUE(a.params == b.params);
  c.seed = 4;
  CounterEnv e3;
  EXPECT_FALSE(train(e3, c, kNoop, kNoopEnd).params == a.params);
}

TEST(Train, RejectsInvalidConfig) {
  CounterEnv env;
  TrainConfig c = small_config();
  c.gamma = 0.0;
  EXPECT_THROW(train(env, c, kNoop, kNoopEnd), std::invalid_argument);
  c = small_config();
  c.kappa = 1.0;
  EXPECT_THROW(train(env, c, kNoop, kNoopEnd), std::invalid_argument);
  c = small_config();
  c.batch_size = 0;
  EXPECT_THROW(train(env, c, kNoop, kNoopEnd), std::invalid_argument);
}

TEST(ReplayBuffer, FifoEviction) {
  ReplayBuffer<int> buffer(3);
  for (int i = 0; i < 5; ++i) buffer.push(i);
  EXPECT_EQ(buffer.size(), 3u);
  const std::multiset<int> held{buffer[0], buffer[1], buffer[2]};
  EXPECT_EQ(held, (std::multiset<int>{2, 3, 4}));
  EXPECT_THROW(ReplayBuffer<int>(0), std::invalid_argument);
  std::mt19937_64 rng(1);
  EXPECT_THROW(ReplayBuffer<int>(2).sample_indices(1, rng), std::logic_error);
}

TEST(ReplayBuffer, UniformSampling) {
  ReplayBuffer<int> buffer(10);
  for (int i = 0; i < 10; ++i) buffer.push(i);
  std::mt19937_64 rng(12);
  std::vector<double> counts(10, 0.0);
  const std::size_t draws = 200000;
  for (std::size_t index : buffer.sample_indices(draws, rng)) counts[index] += 1.0;
  double chi2 = 0.0;
  const double expected = static_cast<double>(draws) / 10.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 27.88);  // 9 degrees of freedom, p = 0.001
}

std::shared_ptr<const MarketProfile> flat_profile(std::size_t n, const std::string& id) {
  auto p = std::make_shared<MarketProfile>();
  p->id = id;
  for (std::size_t i = 0; i < n; ++i) {
    p->price.push_back(30.0 + 20.0 * std::sin(static_cast<double>(i) / 5.0));
    p->fr.push_back(0.0);
  }
  return p;
}

TEST(TrainBattery, RejectsShortProfiles) {
  TrainConfig c = small_config();
  c.steps_per_episode = 50;
  c.episodes = 1;
  const std::vector<ProfilePtr> profiles{flat_profile(20, "short")};
  EXPECT_THROW(train_battery(EnvConfig{}, c, profiles), std::invalid_argument);
  EXPECT_THROW(train_battery(EnvConfig{}, c, std::vector<ProfilePtr>{}), std::invalid_argument);
}

TEST(TrainBattery, CyclesThroughProfiles) {
  TrainConfig c = small_config();
  c.steps_per_episode = 30;
  c.episodes = 5;
  const std::vector<ProfilePtr> profiles{flat_profile(30, "a"), flat_profile(40, "b")};
  std::vector<std::string> seen;
  BatteryTrainOptions options;
  options.on_episode = [&](const EpisodeTrace& t) { seen.push_back(t.profile_id); };
  const auto result = train_battery(EnvConfig{}, c, profiles, options);
  EXPECT_EQ(seen, (std::vector<std::string>{"a", "b", "a", "b", "a"}));
  EXPECT_EQ(result.replay_size, 150u);
  for (const auto& row : result.trace) {
    EXPECT_NEAR(row.total_reward, -(row.energy_cost + row.fr_penalty + row.degradation_cost),
                1e-9);
    // Cycle mode: the recorded cost is the rainflow cost of the path.
    EXPECT_NEAR(row.cycle_degradation_cost, row.degradation_cost,
                1e-9 * std::max(1.0, row.degradation_cost));
  }
}

TEST(TrainBattery, LinearModeFitsCoefficient) {
  TrainConfig c = small_config();
  c.steps_per_episode = 60;
  c.episodes = 2;
  EnvConfig env;
  env.cost.mode = DegradationMode::Linear;
  const std::vector<ProfilePtr> profiles{flat_profile(60, "a")};
  const auto result = train_battery(env, c, profiles);
  for (const auto& row : result.trace) {
    EXPECT_GE(row.degradation_cost, 0.0);
    EXPECT_GE(row.cycle_degradation_cost, 0.0);
  }

  const auto traj = random_policy_trajectory(env, profiles[0], 60, 7);
  EXPECT_EQ(traj.soc.size(), 61u);
  EXPECT_GT(linearized_coefficient(traj, env.cost.degradation), 0.0);
}

}  // namespace
}  // namespace cyclerl
