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

// Policy evaluation and reporting: greedy rollouts, CD-vs-LD comparison
// statistics, auxiliary degradation factors, a dynamic-programming
// arbitrage bound and the tracker-vs-rainflow equivalence fuzzer.

#ifndef CYCLERL_REPORT_HPP_
#define CYCLERL_REPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclerl/battery_env.hpp"
#include "cyclerl/cycle_tracker.hpp"
#include "cyclerl/dqn.hpp"
#include "cyclerl/q_network.hpp"
#include "cyclerl/rainflow.hpp"

namespace cyclerl {

struct EpisodeReport {
  std::string profile_id;
  std::size_t steps = 0;
  double energy_cost = 0.0;
  double fr_penalty = 0.0;
  double degradation_cost = 0.0;
  double total_reward = 0.0;
  std::vector<CycleRecord> cycles;
  double rainflow_cost = 0.0;  // oracle cost of the realized path, unscaled
  double throughput = 0.0;
  double mean_soc = 0.0;
  std::vector<double> soc_trace;  // filled only when requested

  friend bool operator==(const EpisodeReport&, const EpisodeReport&) = default;
};

struct DegradationFactors {
  double c_rate_factor = 0.0;
  double soc_stress = 0.0;
};

/// Total depth of discharge over the cycle list (a full cycle counts twice).
inline double depth_of_discharge_sum(std::span<const CycleRecord> cycles) {
  double total = 0.0;
  for (const auto& cycle : cycles) {
    total += cycle.kind == CycleKind::Full ? 2.0 * cycle.depth : cycle.depth;
  }
  return total;
}

inline DegradationFactors degradation_factors(const EpisodeReport& report) {
  return {depth_of_discharge_sum(report.cycles), report.mean_soc};
}

/// Greedy rollout of `params` over each profile. The reported degradation
/// follows `env_config.cost.mode`; rainflow_cost is always the oracle cost.
inline std::vector<EpisodeReport> evaluate(const QNetworkParams& params,
                                           std::span<const ProfilePtr> profiles,
                                           const EnvConfig& env_config,
                                           bool keep_soc_trace = false) {
  if (params.input_size() != kObservationSize ||
      params.output_size() != env_config.action_set.size()) {
    throw std::invalid_argument(
        "evaluate: network architecture does not match observation/action sizes");
  }
  std::vector<EpisodeReport> reports;
  reports.reserve(profiles.size());
  BatteryEnv env(env_config);
  for (const auto& profile : profiles) {
    Observation observation = env.reset(profile);
    EpisodeReport report;
    report.profile_id = profile->id;
    std::vector<double> soc{env.state().soc};
    soc.reserve(profile->size() + 1);
    while (!env.done()) {
      const std::size_t action = argmax(q_forward(params, observation));
      const StepResult step = env.step(action);
      report.energy_cost += step.reward.energy_cost;
      report.fr_penalty += step.reward.fr_penalty;
      report.degradation_cost += step.reward.degradation_cost;
      soc.push_back(env.state().soc);
      observation = step.observation;
    }
    report.steps = env.state().t;
    report.total_reward = -(report.energy_cost + report.fr_penalty + report.degradation_cost);
    const auto rainflow =
        rainflow_decompose(SocTrajectory{soc, env_config.battery.dt_seconds},
                           env_config.cost.degradation);
    report.cycles = rainflow.cycles;
    report.rainflow_cost = rainflow.total_cost;
    report.throughput = rainflow.throughput;
    double sum = 0.0;
    for (double c : soc) sum += c;
    report.mean_soc = sum / static_cast<double>(soc.size());
    if (keep_soc_trace) report.soc_trace = std::move(soc);
    reports.push_back(std::move(report));
  }
  return reports;
}

inline void write_episode_reports_csv(std::ostream& out, std::span<const EpisodeReport> reports) {
  out << "profile_id,steps,h_e,h_f,h_d,total_reward,rainflow_cost,throughput,mean_soc,"
         "full_cycles,half_cycles,c_rate_factor\n";
  out.precision(17);
  for (const auto& r : reports) {
    std::size_t full = 0;
    for (const auto& c : r.cycles) full += c.kind == CycleKind::Full ? 1 : 0;
    out << r.profile_id << ',' << r.steps << ',' << r.energy_cost << ',' << r.fr_penalty
        << ',' << r.degradation_cost << ',' << r.total_reward << ',' << r.rainflow_cost << ','
        << r.throughput << ',' << r.mean_soc << ',' << full << ',' << r.cycles.size() - full
        << ',' << depth_of_discharge_sum(r.cycles) << '\n';
  }
}

/// Reads the summary columns of an episode report CSV (cycle lists are not
/// stored there and come back empty).
inline std::vector<EpisodeReport> read_episode_reports_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("episode report file is empty", 1);
  std::map<std::string, std::size_t> column;
  {
    std::stringstream header(line);
    std::string name;
    for (std::size_t i = 0; std::getline(header, name, ','); ++i) column[detail::trim(name)] = i;
  }
  for (const char* required : {"profile_id", "h_e", "h_f", "h_d", "total_reward"}) {
    if (!column.count(required)) {
      throw ParseError(std::string("missing column ") + required, 1);
    }
  }
  std::vector<EpisodeReport> reports;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() < column.size()) throw ParseError("too few fields", line_no);
    const auto number = [&](const char* name) {
      return detail::parse_finite(fields[column.at(name)], line_no);
    };
    EpisodeReport r;
    r.profile_id = detail::trim(fields[column.at("profile_id")]);
    r.energy_cost = number("h_e");
    r.fr_penalty = number("h_f");
    r.degradation_cost = number("h_d");
    r.total_reward = number("total_reward");
    if (column.count("steps")) r.steps = static_cast<std::size_t>(number("steps"));
    if (column.count("rainflow_cost")) r.rainflow_cost = number("rainflow_cost");
    if (column.count("throughput")) r.throughput = number("throughput");
    if (column.count("mean_soc")) r.mean_soc = number("mean_soc");
    reports.push_back(std::move(r));
  }
  return reports;
}

/// Summary of a list of per-day differences. Means over an empty subset
/// are reported as 0.
struct DifferenceStats {
  double mean = 0.0;
  double max = 0.0;
  double min = 0.0;
  double mean_positive = 0.0;
  double mean_negative = 0.0;
  double fraction_nonnegative = 0.0;
};

inline DifferenceStats summarize_differences(std::span<const double> diffs) {
  DifferenceStats stats;
  if (diffs.empty()) return stats;
  stats.max = -std::numeric_limits<double>::infinity();
  stats.min = std::numeric_limits<double>::infinity();
  double sum = 0.0, pos_sum = 0.0, neg_sum = 0.0;
  std::size_t pos = 0, neg = 0, nonneg = 0;
  for (double d : diffs) {
    sum += d;
    stats.max = std::max(stats.max, d);
    stats.min = std::min(stats.min, d);
    if (d > 0.0) {
      pos_sum += d;
      ++pos;
    } else if (d < 0.0) {
      neg_sum += d;
      ++neg;
    }
    if (d >= 0.0) ++nonneg;
  }
  const auto n = static_cast<double>(diffs.size());
  stats.mean = sum / n;
  stats.mean_positive = pos > 0 ? pos_sum / static_cast<double>(pos) : 0.0;
  stats.mean_negative = neg > 0 ? neg_sum / static_cast<double>(neg) : 0.0;
  stats.fraction_nonnegative = static_cast<double>(nonneg) / n;
  return stats;
}

struct ComparisonStats {
  std::vector<std::string> profile_ids;
  std::vector<double> reward_diffs;       // CD - LD total reward
  std::vector<double> degradation_diffs;  // LD - CD degradation cost
  DifferenceStats reward;
  DifferenceStats degradation;

  double fraction_cd_ge_ld() const { return reward.fraction_nonnegative; }
};

inline ComparisonStats compare_cd_ld(std::span<const EpisodeReport> cd,
                                     std::span<const EpisodeReport> ld) {
  if (cd.size() != ld.size()) {
    throw std::invalid_argument("compare_cd_ld: report lists differ in length");
  }
  ComparisonStats stats;
  for (std::size_t i = 0; i < cd.size(); ++i) {
    if (cd[i].profile_id != ld[i].profile_id) {
      throw std::invalid_argument("compare_cd_ld: profile ids misaligned at position " +
                                  std::to_string(i) + " ('" + cd[i].profile_id + "' vs '" +
                                  ld[i].profile_id + "')");
    }
    stats.profile_ids.push_back(cd[i].profile_id);
    stats.reward_diffs.push_back(cd[i].total_reward - ld[i].total_reward);
    stats.degradation_diffs.push_back(ld[i].degradation_cost - cd[i].degradation_cost);
  }
  stats.reward = summarize_differences(stats.reward_diffs);
  stats.degradation = summarize_differences(stats.degradation_diffs);
  return stats;
}

inline void write_comparison_csv(std::ostream& out, const ComparisonStats& stats) {
  out << "statistic,reward_diff,degradation_diff\n";
  out.precision(17);
  const auto row = [&](const char* name, double a, double b) {
    out << name << ',' << a << ',' << b << '\n';
  };
  row("mean", stats.reward.mean, stats.degradation.mean);
  row("max", stats.reward.max, stats.degradation.max);
  row("min", stats.reward.min, stats.degradation.min);
  row("mean_positive", stats.reward.mean_positive, stats.degradation.mean_positive);
  row("mean_negative", stats.reward.mean_negative, stats.degradation.mean_negative);
  row("fraction_nonnegative", stats.reward.fraction_nonnegative,
      stats.degradation.fraction_nonnegative);
}

inline void write_comparison_days_csv(std::ostream& out, const ComparisonStats& stats) {
  out << "profile_id,reward_diff,degradation_diff\n";
  out.precision(17);
  for (std::size_t i = 0; i < stats.profile_ids.size(); ++i) {
    out << stats.profile_ids[i] << ',' << stats.reward_diffs[i] << ','
        << stats.degradation_diffs[i] << '\n';
  }
}

struct DpResult {
  double value = 0.0;
  std::size_t grid_points = 0;
  std::vector<double> soc_path;  // optimal SoC after each step, starting point first
};

/// Backward induction for pure arbitrage (no regulation, no degradation)
/// on the SoC grid soc_min + k * grid_step. From each grid point the battery
/// may move to any grid point within rho * max|action| of it; with a grid
/// step dividing every action's SoC change this is exactly the discrete
/// action set. Refining the grid by an integer factor never lowers the value.
inline DpResult dp_arbitrage_oracle(std::span<const double> prices,
                                    const BatteryParams& battery, double grid_step,
                                    double initial_soc,
                                    std::span<const double> action_set = {}) {
  battery.validate();
  double max_action = 1.0;
  if (!action_set.empty()) {
    max_action = 0.0;
    for (double a : action_set) max_action = std::max(max_action, std::abs(a));
  }
  const double max_move = battery.rate_fraction_per_step * max_action;
  if (!(grid_step > 0.0)) throw std::invalid_argument("dp_arbitrage_oracle: grid_step must be > 0");
  if (grid_step > max_move * (1.0 + 1e-12)) {
    throw std::invalid_argument("dp_arbitrage_oracle: grid resolution is coarser than the rate");
  }
  const auto points = static_cast<std::size_t>(
                          std::floor((battery.soc_max - battery.soc_min) / grid_step + 1e-9)) + 1;
  const auto reach = static_cast<std::ptrdiff_t>(std::floor(max_move / grid_step + 1e-9));
  const auto start = static_cast<std::size_t>(std::clamp<long long>(
      std::llround((initial_soc - battery.soc_min) / grid_step), 0,
      static_cast<long long>(points) - 1));
  const double energy_mwh = battery.capacity_mwh();

  const std::size_t steps = prices.size();
  std::vector<double> value(points, 0.0), next(points, 0.0);
  std::vector<std::vector<std::uint32_t>> choice(steps, std::vector<std::uint32_t>(points, 0));
  for (std::size_t t = steps; t-- > 0;) {
    for (std::size_t i = 0; i < points; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      std::size_t best_j = i;
      const auto lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(i) - reach));
      const auto hi = std::min(points - 1, i + static_cast<std::size_t>(reach));
      for (std::size_t j = lo; j <= hi; ++j) {
        const double move = (static_cast<double>(j) - static_cast<double>(i)) * grid_step;
        const double candidate = -prices[t] * move * energy_mwh + value[j];
        if (candidate > best) {
          best = candidate;
          best_j = j;
        }
      }
      next[i] = best;
      choice[t][i] = static_cast<std::uint32_t>(best_j);
    }
    std::swap(value, next);
  }

  DpResult result;
  result.value = value[start];
  result.grid_points = points;
  std::size_t i = start;
  result.soc_path.push_back(battery.soc_min + static_cast<double>(i) * grid_step);
  for (std::size_t t = 0; t < steps; ++t) {
    i = choice[t][i];
    result.soc_path.push_back(battery.soc_min + static_cast<double>(i) * grid_step);
  }
  return result;
}

struct FuzzConfig {
  std::size_t walks = 1000;
  std::size_t length = 2000;
  std::uint64_t seed = 7;
  double rate = 0.05;
  double soc_min = 0.1;
  double soc_max = 1.0;
  DegradationParams params;
  double tolerance = 1e-9;
};

struct FuzzSummary {
  std::size_t walks = 0;
  double max_relative_deviation = 0.0;
  std::size_t worst_walk = 0;
  bool passed = false;
};

inline double relative_deviation(double value, double reference) {
  const double diff = std::abs(value - reference);
  if (diff == 0.0) return 0.0;
  return diff / std::max(std::abs(reference), std::numeric_limits<double>::min());
}

/// Random bounded SoC walk mixing idle steps, discrete action levels and
/// continuous moves; steps never exceed `rate` in magnitude.
template <class Rng>
std::vector<double> random_soc_walk(std::size_t length, double rate, double soc_min,
                                    double soc_max, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> level(-1.0, 1.0);
  std::uniform_int_distribution<int> discrete(-5, 5);
  std::vector<double> walk;
  walk.reserve(length + 1);
  walk.push_back(soc_min + (soc_max - soc_min) * unit(rng));
  for (std::size_t t = 0; t < length; ++t) {
    const double mode = unit(rng);
    double b = 0.0;
    if (mode < 0.1) {
      b = 0.0;
    } else if (mode < 0.5) {
      b = rate * discrete(rng) / 5.0;
    } else {
      b = rate * level(rng);
    }
    walk.push_back(std::clamp(walk.back() + b, soc_min, soc_max));
  }
  return walk;
}

inline FuzzSummary verify_degradation(const FuzzConfig& config) {
  config.params.validate();
  std::mt19937_64 rng(config.seed);
  FuzzSummary summary;
  summary.walks = config.walks;
  for (std::size_t w = 0; w < config.walks; ++w) {
    const auto walk =
        random_soc_walk(config.length, config.rate, config.soc_min, config.soc_max, rng);
    CycleTracker tracker(config.params, walk.front());
    double engine_total = 0.0;
    for (std::size_t t = 1; t < walk.size(); ++t) engine_total += tracker.advance_to(walk[t]);
    const double oracle_total =
        rainflow_decompose(SocTrajectory{walk, 1.0}, config.params).total_cost;
    const double deviation = relative_deviation(engine_total, oracle_total);
    if (deviation > summary.max_relative_deviation) {
      summary.max_relative_deviation = deviation;
      summary.worst_walk = w;
    }
  }
  summary.passed = summary.max_relative_deviation < config.tolerance;
  return summary;
}

}  // namespace cyclerl

#endif  // CYCLERL_REPORT_HPP_
