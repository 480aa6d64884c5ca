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

// Battery arbitrage / frequency-regulation environment.
//
// State per step: price p_t, regulation signal f_t, SoC c_t and the three
// most recent switching points. Reward r_t = -(h_e + h_f + h_d), where
//   h_e = p_t * b_t * E                (energy purchase)
//   h_f = delta * |rho * f_t - b_t| * E (regulation deviation)
//   h_d = cycle-based increment or a_d * |b_t|, times degradation_scale
// with b_t the SoC change of the step and E the capacity in MWh.

#ifndef CYCLERL_BATTERY_ENV_HPP_
#define CYCLERL_BATTERY_ENV_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cyclerl/cycle_tracker.hpp"
#include "cyclerl/market_data.hpp"
#include "cyclerl/rainflow.hpp"

namespace cyclerl {

inline constexpr std::size_t kObservationSize = 6;
using Observation = std::array<double, kObservationSize>;

struct BatteryParams {
  double capacity_kwh = 200.0;
  double soc_min = 0.1;
  double soc_max = 1.0;
  double rate_fraction_per_step = 0.05;  // rho
  double dt_seconds = 300.0;

  /// rho = power * dt / (3600 * capacity).
  static BatteryParams from_rating(double power_kw, double capacity_kwh,
                                   double dt_seconds, double soc_min = 0.1,
                                   double soc_max = 1.0) {
    BatteryParams params;
    params.capacity_kwh = capacity_kwh;
    params.soc_min = soc_min;
    params.soc_max = soc_max;
    params.dt_seconds = dt_seconds;
    params.rate_fraction_per_step = power_kw * dt_seconds / (3600.0 * capacity_kwh);
    params.validate();
    return params;
  }

  double capacity_mwh() const { return capacity_kwh / 1000.0; }

  void validate() const {
    if (!(capacity_kwh > 0.0)) {
      throw std::invalid_argument("BatteryParams: capacity_kwh must be > 0");
    }
    if (!(soc_min >= 0.0 && soc_min < soc_max && soc_max <= 1.0)) {
      throw std::invalid_argument("BatteryParams: need 0 <= soc_min < soc_max <= 1");
    }
    if (!(rate_fraction_per_step > 0.0)) {
      throw std::invalid_argument("BatteryParams: rate_fraction_per_step must be > 0");
    }
    if (!(dt_seconds > 0.0)) {
      throw std::invalid_argument("BatteryParams: dt_seconds must be > 0");
    }
  }
};

enum class DegradationMode { Cycle, Linear };

inline const char* to_string(DegradationMode mode) {
  return mode == DegradationMode::Cycle ? "cd" : "ld";
}

inline DegradationMode parse_degradation_mode(const std::string& text) {
  if (text == "cd") return DegradationMode::Cycle;
  if (text == "ld") return DegradationMode::Linear;
  throw std::invalid_argument("unknown degradation mode '" + text + "' (cd|ld)");
}

struct CostParams {
  double delta = 140.0;  // $/MWh of regulation deviation
  DegradationParams degradation;
  double degradation_scale = 1000.0;  // $ per unit of phi
  DegradationMode mode = DegradationMode::Cycle;
  double a_d = 0.0;  // linearized coefficient, Linear mode only

  void validate() const {
    degradation.validate();
    if (!(delta >= 0.0)) throw std::invalid_argument("CostParams: delta must be >= 0");
    if (!(degradation_scale >= 0.0)) {
      throw std::invalid_argument("CostParams: degradation_scale must be >= 0");
    }
    if (mode == DegradationMode::Linear && !(a_d >= 0.0)) {
      throw std::invalid_argument("CostParams: a_d must be >= 0");
    }
  }
};

/// Eleven evenly spaced levels from -1 to 1.
inline std::vector<double> default_action_set() {
  std::vector<double> levels;
  for (int i = -5; i <= 5; ++i) levels.push_back(i / 5.0);
  return levels;
}

/// SoC change for an action, clamped so the SoC stays inside its bounds.
inline double action_to_power(std::size_t action_index, double soc,
                              const BatteryParams& params,
                              std::span<const double> action_set) {
  if (action_index >= action_set.size()) {
    throw std::out_of_range("action_to_power: action index " +
                            std::to_string(action_index) + " out of range");
  }
  const double raw = params.rate_fraction_per_step * action_set[action_index];
  return std::clamp(raw, params.soc_min - soc, params.soc_max - soc);
}

struct RewardBreakdown {
  double energy_cost = 0.0;
  double fr_penalty = 0.0;
  double degradation_cost = 0.0;
  double reward = 0.0;
};

inline RewardBreakdown make_reward(double energy_cost, double fr_penalty,
                                   double degradation_cost) {
  return {energy_cost, fr_penalty, degradation_cost,
          -(energy_cost + fr_penalty + degradation_cost)};
}

struct ObservationScaling {
  double price_scale = 100.0;
};

struct EnvConfig {
  BatteryParams battery;
  CostParams cost;
  std::vector<double> action_set = default_action_set();
  ObservationScaling scaling;
  double initial_soc = 0.5;
  std::optional<std::size_t> sp_cap;

  void validate() const {
    battery.validate();
    cost.validate();
    if (action_set.empty()) throw std::invalid_argument("EnvConfig: empty action set");
    for (double a : action_set) {
      if (!(a >= -1.0 && a <= 1.0)) {
        throw std::invalid_argument("EnvConfig: action levels must lie in [-1, 1]");
      }
    }
    if (!(scaling.price_scale > 0.0)) {
      throw std::invalid_argument("EnvConfig: price_scale must be > 0");
    }
    if (!(initial_soc >= battery.soc_min && initial_soc <= battery.soc_max)) {
      throw std::invalid_argument("EnvConfig: initial_soc outside [soc_min, soc_max]");
    }
  }
};

struct EnvState {
  std::size_t t = 0;
  double price = 0.0;
  double fr = 0.0;
  double soc = 0.5;
  CycleTracker tracker;
};

struct StepResult {
  Observation observation{};
  RewardBreakdown reward;
  bool terminal = false;
};

/// One row of the optional per-step trace.
struct StepRecord {
  std::size_t t = 0;
  double price = 0.0;
  double fr = 0.0;
  double action = 0.0;
  double power = 0.0;
  double soc = 0.0;  // after the step
  RewardBreakdown reward;
};

inline void write_step_trace_csv(std::ostream& out, std::span<const StepRecord> rows) {
  out << "t,p,f,a,b,soc,h_e,h_f,h_d,r\n";
  out.precision(17);
  for (const auto& row : rows) {
    out << row.t << ',' << row.price << ',' << row.fr << ',' << row.action << ','
        << row.power << ',' << row.soc << ',' << row.reward.energy_cost << ','
        << row.reward.fr_penalty << ',' << row.reward.degradation_cost << ','
        << row.reward.reward << '\n';
  }
}

class BatteryEnv {
 public:
  explicit BatteryEnv(EnvConfig config) : config_(std::move(config)) {
    config_.validate();
    state_.tracker = CycleTracker(config_.cost.degradation, config_.initial_soc,
                                  config_.sp_cap);
  }

  /// Starts an episode over the first `horizon` steps of `profile`
  /// (the whole profile when horizon is 0).
  Observation reset(std::shared_ptr<const MarketProfile> profile,
                    std::size_t horizon = 0) {
    if (!profile) throw std::invalid_argument("BatteryEnv::reset: null profile");
    profile->validate();
    if (horizon == 0) horizon = profile->size();
    if (horizon > profile->size()) {
      throw std::invalid_argument("BatteryEnv::reset: horizon exceeds profile length");
    }
    profile_ = std::move(profile);
    horizon_ = horizon;
    state_.t = 0;
    state_.price = profile_->price[0];
    state_.fr = profile_->fr[0];
    state_.soc = config_.initial_soc;
    state_.tracker.reset(config_.initial_soc);
    trace_.clear();
    return observe();
  }

  StepResult step(std::size_t action_index) {
    if (!profile_) throw std::logic_error("BatteryEnv::step: reset() not called");
    if (done()) throw std::logic_error("BatteryEnv::step: episode is over");

    const auto& battery = config_.battery;
    const auto& cost = config_.cost;
    const double b = action_to_power(action_index, state_.soc, battery, config_.action_set);
    const double next_soc = std::clamp(state_.soc + b, battery.soc_min, battery.soc_max);
    const double energy_mwh = battery.capacity_mwh();

    const double h_e = state_.price * b * energy_mwh;
    const double h_f = cost.delta *
                       std::abs(battery.rate_fraction_per_step * state_.fr - b) *
                       energy_mwh;
    const double cycle_increment = state_.tracker.advance_to(next_soc);
    const double h_d = cost.mode == DegradationMode::Cycle
                           ? cost.degradation_scale * cycle_increment
                           : cost.degradation_scale * cost.a_d * std::abs(b);

    StepResult result;
    result.reward = make_reward(h_e, h_f, h_d);
    if (tracing_) {
      trace_.push_back({state_.t, state_.price, state_.fr,
                        config_.action_set[action_index], b, next_soc, result.reward});
    }

    state_.soc = next_soc;
    ++state_.t;
    const std::size_t next = std::min(state_.t, profile_->size() - 1);
    state_.price = profile_->price[next];
    state_.fr = profile_->fr[next];
    result.terminal = done();
    result.observation = observe();
    return result;
  }

  Observation observe() const {
    const SpTriple sps = state_.tracker.observe_sps();
    return {state_.price / config_.scaling.price_scale, state_.fr, state_.soc,
            sps.c0, sps.c1, sps.c2};
  }

  bool done() const { return state_.t >= horizon_; }
  std::size_t num_actions() const { return config_.action_set.size(); }
  std::size_t horizon() const { return horizon_; }
  const EnvState& state() const { return state_; }
  const EnvConfig& config() const { return config_; }
  const MarketProfile* profile() const { return profile_.get(); }

  void set_linear_coefficient(double a_d) {
    if (!(a_d >= 0.0) || !std::isfinite(a_d)) {
      throw std::invalid_argument("BatteryEnv: a_d must be finite and >= 0");
    }
    config_.cost.a_d = a_d;
  }

  void set_tracing(bool enabled) { tracing_ = enabled; }
  const std::vector<StepRecord>& trace() const { return trace_; }

 private:
  EnvConfig config_;
  EnvState state_;
  std::shared_ptr<const MarketProfile> profile_;
  std::size_t horizon_ = 0;
  bool tracing_ = false;
  std::vector<StepRecord> trace_;
};

}  // namespace cyclerl

#endif  // CYCLERL_BATTERY_ENV_HPP_
