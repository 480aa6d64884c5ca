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

// DQN training loop: epsilon-greedy rollouts, experience replay, a target
// network refreshed every `target_interval` steps and Adam updates on the
// Bellman loss. Epsilon decays multiplicatively once per environment step.

#ifndef CYCLERL_DQN_HPP_
#define CYCLERL_DQN_HPP_

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclerl/battery_env.hpp"
#include "cyclerl/q_network.hpp"
#include "cyclerl/rainflow.hpp"
#include "cyclerl/replay_buffer.hpp"

namespace cyclerl {

enum class ProfileOrder { RoundRobin, Random };

struct TrainConfig {
  double gamma = 1.0;
  double learning_rate = 1e-3;
  double epsilon_init = 1.0;
  double epsilon_floor = 1e-3;
  double kappa = 0.0;  // 0 selects the rate that hits the floor halfway through
  std::size_t batch_size = 256;
  std::size_t target_interval = 500;
  std::size_t episodes = 2000;
  std::size_t steps_per_episode = 8640;
  std::size_t replay_capacity = 100000;
  std::size_t learn_start = 0;  // 0 means batch_size
  std::vector<std::size_t> hidden = {128, 32};
  AdamConfig adam;
  std::uint64_t seed = 1;
  ProfileOrder order = ProfileOrder::RoundRobin;

  double effective_kappa() const {
    if (kappa > 0.0) return kappa;
    const double half = 0.5 * static_cast<double>(episodes * steps_per_episode);
    if (epsilon_init <= epsilon_floor || half < 1.0) return 0.5;
    return std::pow(epsilon_floor / epsilon_init, 1.0 / half);
  }

  std::size_t effective_learn_start() const {
    return learn_start > 0 ? learn_start : batch_size;
  }

  void validate() const {
    if (!(gamma > 0.0 && gamma <= 1.0)) {
      throw std::invalid_argument("TrainConfig: gamma must lie in (0, 1]");
    }
    if (!(learning_rate > 0.0)) {
      throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    }
    if (!(epsilon_init >= 0.0 && epsilon_init <= 1.0) ||
        !(epsilon_floor >= 0.0 && epsilon_floor <= 1.0)) {
      throw std::invalid_argument("TrainConfig: epsilon values must lie in [0, 1]");
    }
    if (!(kappa == 0.0 || (kappa > 0.0 && kappa < 1.0))) {
      throw std::invalid_argument("TrainConfig: kappa must lie in (0, 1)");
    }
    if (batch_size == 0 || target_interval == 0 || episodes == 0 ||
        steps_per_episode == 0 || replay_capacity == 0) {
      throw std::invalid_argument("TrainConfig: sizes and counts must be > 0");
    }
  }
};

struct EpisodeTrace {
  std::size_t episode = 0;
  std::string profile_id;
  double total_reward = 0.0;
  double energy_cost = 0.0;
  double fr_penalty = 0.0;
  double degradation_cost = 0.0;
  double epsilon = 0.0;
  // Degradation of the realized path under the cycle-based model, whatever
  // model drove training; NaN when not computed.
  double cycle_degradation_cost = std::numeric_limits<double>::quiet_NaN();

  double cycle_total_reward() const {
    return -(energy_cost + fr_penalty + cycle_degradation_cost);
  }
};

inline void write_train_trace_csv(std::ostream& out, std::span<const EpisodeTrace> rows) {
  out << "episode,profile_id,total_reward,h_e,h_f,h_d,epsilon,h_d_cycle,total_reward_cycle\n";
  out.precision(17);
  for (const auto& row : rows) {
    out << row.episode << ',' << row.profile_id << ',' << row.total_reward << ','
        << row.energy_cost << ',' << row.fr_penalty << ',' << row.degradation_cost << ','
        << row.epsilon << ',' << row.cycle_degradation_cost << ',' << row.cycle_total_reward()
        << '\n';
  }
}

struct TrainResult {
  QNetworkParams params;
  TargetParams target;
  std::vector<EpisodeTrace> trace;
  std::size_t replay_size = 0;
  std::size_t updates = 0;
  double final_epsilon = 0.0;
};

template <class Env>
concept DqnEnvironment = requires(Env& env, const Env& cenv, std::size_t action) {
  { cenv.num_actions() } -> std::convertible_to<std::size_t>;
  { cenv.observe() } -> std::convertible_to<Observation>;
  { env.step(action) } -> std::convertible_to<StepResult>;
};

/// Runs `config.episodes` episodes of at most `config.steps_per_episode`
/// steps. `begin_episode(env, n)` must reset the environment for episode n;
/// `end_episode(env, n, trace)` runs after it.
template <DqnEnvironment Env, class BeginEpisode, class EndEpisode>
TrainResult train(Env& env, const TrainConfig& config, BeginEpisode&& begin_episode,
                  EndEpisode&& end_episode) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const auto sizes = network_sizes(kObservationSize, config.hidden, env.num_actions());

  TrainResult result;
  result.params = QNetworkParams::random(sizes, rng);
  result.target = result.params;
  AdamOptimizer optimizer(result.params, config.adam);
  ReplayBuffer<Transition> replay(config.replay_capacity);
  std::vector<Transition> batch;
  batch.reserve(config.batch_size);

  const double kappa = config.effective_kappa();
  const std::size_t learn_start = config.effective_learn_start();
  double epsilon = config.epsilon_init;
  std::size_t global_step = 0;

  for (std::size_t episode = 0; episode < config.episodes; ++episode) {
    begin_episode(env, episode);
    EpisodeTrace trace;
    trace.episode = episode;
    Observation observation = env.observe();
    for (std::size_t t = 0; t < config.steps_per_episode; ++t) {
      const std::size_t action = select_action(result.params, observation, epsilon, rng);
      const StepResult step = env.step(action);
      const bool terminal = step.terminal || t + 1 == config.steps_per_episode;
      replay.push({observation, action, step.reward.reward, step.observation, terminal});

      trace.energy_cost += step.reward.energy_cost;
      trace.fr_penalty += step.reward.fr_penalty;
      trace.degradation_cost += step.reward.degradation_cost;

      if (replay.size() >= learn_start) {
        replay.sample(config.batch_size, rng, batch);
        const auto loss = bellman_loss_grad(result.params, result.target, batch, config.gamma);
        optimizer.update(result.params, loss.gradient, config.learning_rate);
        ++result.updates;
      }
      ++global_step;
      if (global_step % config.target_interval == 0) result.target = result.params;
      epsilon = std::max(epsilon * kappa, config.epsilon_floor);
      observation = step.observation;
      if (step.terminal) break;
    }
    trace.total_reward = -(trace.energy_cost + trace.fr_penalty + trace.degradation_cost);
    trace.epsilon = epsilon;
    end_episode(env, episode, trace);
    result.trace.push_back(std::move(trace));
  }
  result.replay_size = replay.size();
  result.final_epsilon = epsilon;
  return result;
}

using ProfilePtr = std::shared_ptr<const MarketProfile>;

struct BatteryTrainOptions {
  /// Linear mode: refit a_d on each finished episode's SoC trajectory.
  bool refresh_linear_coefficient = true;
  std::function<void(const EpisodeTrace&)> on_episode;
};

/// SoC trajectory of a uniformly random policy over one profile; used to
/// seed the linearized coefficient before any learned trajectory exists.
inline SocTrajectory random_policy_trajectory(const EnvConfig& env_config,
                                              const ProfilePtr& profile,
                                              std::size_t horizon, std::uint64_t seed) {
  EnvConfig config = env_config;
  config.cost.mode = DegradationMode::Cycle;
  BatteryEnv env(config);
  env.reset(profile, horizon);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, env.num_actions() - 1);
  SocTrajectory traj;
  traj.dt_seconds = config.battery.dt_seconds;
  traj.soc.push_back(env.state().soc);
  while (!env.done()) {
    env.step(pick(rng));
    traj.soc.push_back(env.state().soc);
  }
  return traj;
}

/// DQN training on battery profiles, cycling through them per episode.
inline TrainResult train_battery(const EnvConfig& env_config, const TrainConfig& config,
                                 std::span<const ProfilePtr> profiles,
                                 const BatteryTrainOptions& options = {}) {
  config.validate();
  if (profiles.empty()) throw std::invalid_argument("train: no training profiles");
  for (const auto& profile : profiles) {
    if (!profile) throw std::invalid_argument("train: null profile");
    profile->validate();
    if (profile->size() < config.steps_per_episode) {
      throw std::invalid_argument("train: profile '" + profile->id + "' has " +
                                  std::to_string(profile->size()) +
                                  " steps, fewer than steps_per_episode");
    }
  }

  EnvConfig initial = env_config;
  const bool linear = initial.cost.mode == DegradationMode::Linear;
  if (linear && !(initial.cost.a_d > 0.0)) {
    const auto traj = random_policy_trajectory(initial, profiles.front(),
                                               config.steps_per_episode, config.seed ^ 0x5eedULL);
    initial.cost.a_d = linearized_coefficient(traj, initial.cost.degradation);
  }
  BatteryEnv env(initial);

  std::mt19937_64 order_rng(config.seed + 1);
  std::uniform_int_distribution<std::size_t> pick(0, profiles.size() - 1);
  std::vector<double> soc_path;

  auto begin = [&](BatteryEnv& e, std::size_t episode) {
    const std::size_t index = config.order == ProfileOrder::RoundRobin
                                  ? episode % profiles.size()
                                  : pick(order_rng);
    e.reset(profiles[index], config.steps_per_episode);
    soc_path.assign(1, e.state().soc);
  };
  auto end = [&](BatteryEnv& e, std::size_t, EpisodeTrace& trace) {
    trace.profile_id = e.profile()->id;
    const auto& cost = e.config().cost;
    SocTrajectory realized{soc_path, e.config().battery.dt_seconds};
    trace.cycle_degradation_cost =
        cost.degradation_scale * rainflow_decompose(realized, cost.degradation).total_cost;
    if (linear && options.refresh_linear_coefficient) {
      if (throughput(realized.soc) > 0.0) {
        e.set_linear_coefficient(linearized_coefficient(realized, cost.degradation));
      }
    }
    if (options.on_episode) options.on_episode(trace);
  };

  // Records SoC after each step so the linear refit sees the realized path.
  struct RecordingEnv {
    BatteryEnv& env;
    std::vector<double>& path;
    std::size_t num_actions() const { return env.num_actions(); }
    Observation observe() const { return env.observe(); }
    StepResult step(std::size_t action) {
      StepResult result = env.step(action);
      path.push_back(env.state().soc);
      return result;
    }
  };
  RecordingEnv recording{env, soc_path};
  return train(
      recording, config,
      [&](RecordingEnv& r, std::size_t n) { begin(r.env, n); },
      [&](RecordingEnv& r, std::size_t n, EpisodeTrace& trace) { end(r.env, n, trace); });
}

}  // namespace cyclerl

#endif  // CYCLERL_DQN_HPP_
