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

// Tour of the library: per-step cycle cost, the battery environment and a
// short DQN run scored against the arbitrage optimum.

#include <cstdio>
#include <memory>
#include <vector>

#include "cyclerl/cyclerl.hpp"

using namespace cyclerl;

int main() {
  // 1. Per-step degradation of the walk 0.2 -> 0.5 -> 0.4 -> 0.9. Each
  // increment depends only on the switching points the tracker keeps.
  const DegradationParams params{4.5e-3, 1.3};
  const std::vector<double> walk{0.2, 0.5, 0.4, 0.9};
  CycleTracker tracker(params, walk.front());
  double total = 0.0;
  for (std::size_t t = 1; t < walk.size(); ++t) {
    const double increment = tracker.advance_to(walk[t]);
    total += increment;
    const auto sp = tracker.observe_sps();
    std::printf("soc %.1f  increment %.6e  switching points (%.1f, %.1f, %.1f)\n", walk[t],
                increment, sp.c0, sp.c1, sp.c2);
  }
  const auto rainflow = rainflow_decompose(SocTrajectory{walk, 300.0}, params);
  std::printf("tracker total %.10e, rainflow total %.10e\n\n", total, rainflow.total_cost);

  // 2. One synthetic day at 5-minute steps; charge overnight, discharge at
  // the evening peak.
  SyntheticSpec spec;
  spec.seed = 3;
  const ProfilePtr day = std::make_shared<const MarketProfile>(synth_profile(spec, "day"));
  EnvConfig env_config;
  env_config.cost.delta = 0.0;
  BatteryEnv env(env_config);
  env.reset(day);
  double reward = 0.0;
  while (!env.done()) {
    const double hour = static_cast<double>(env.state().t) * day->dt_seconds / 3600.0;
    const std::size_t action = hour < 6.0 ? 10 : (hour >= 16.0 && hour < 20.0 ? 0 : 5);
    reward += env.step(action).reward.reward;
  }
  std::printf("scripted day: reward %.3f, final SoC %.3f\n", reward, env.state().soc);

  // 3. A short training run on the same day, then its greedy reward next
  // to the dynamic-programming optimum without degradation.
  EnvConfig arbitrage = env_config;
  arbitrage.cost.degradation_scale = 0.0;
  TrainConfig config;
  config.episodes = 60;
  config.steps_per_episode = 288;
  config.batch_size = 64;
  config.gamma = 0.99;
  config.learning_rate = 1e-4;
  config.target_interval = 2000;
  const std::vector<ProfilePtr> days{day};
  const auto trained = train_battery(arbitrage, config, days);
  const auto report = evaluate(trained.params, days, arbitrage).front();
  const double optimum =
      dp_arbitrage_oracle(day->price, arbitrage.battery, 0.01, arbitrage.initial_soc,
                          arbitrage.action_set)
          .value;
  std::printf("DQN after %zu episodes: %.3f (optimum %.3f)\n", config.episodes,
              report.total_reward, optimum);
  return 0;
}
