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

// Command-line front end. Exit codes: 0 success, 1 validation failure (bad
// data, failed check), 2 usage error (bad flags or config file).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cyclerl/cyclerl.hpp"

namespace fs = std::filesystem;

namespace cyclerl::cli {
namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  // Inputs and outputs.
  std::vector<std::string> price;
  std::vector<std::string> fr;
  std::string config;
  std::string weights;
  std::string mode = "cd";
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  double dt = 0.0;  // 0 selects the subcommand default
  std::size_t synthetic_days = 0;

  // Battery and costs.
  double power_kw = 120.0;
  double capacity_kwh = 200.0;
  double soc_min = 0.1;
  double soc_max = 1.0;
  double initial_soc = 0.5;
  double delta = 140.0;
  double degradation_scale = 1000.0;
  double alpha_d = 4.5e-3;
  double beta = 1.3;
  double a_d = 0.0;

  // Training.
  std::size_t episodes = 2000;
  std::size_t steps = 0;  // 0 means the shortest profile
  double gamma = 1.0;
  double learning_rate = 1e-3;
  std::size_t batch_size = 256;
  std::size_t target_interval = 500;
  std::size_t replay_capacity = 100000;
  std::vector<std::size_t> hidden = {128, 32};

  // gen-data.
  std::size_t days = 7;
  double price_mean = 40.0;
  double price_amplitude = 25.0;
  double price_noise = 5.0;
  double fr_noise = 0.4;

  // compare.
  std::string cd_reports;
  std::string ld_reports;

  // verify-degradation.
  std::size_t walks = 1000;
  std::size_t length = 2000;
  std::string trajectory;

  // dp-oracle.
  double grid = 0.01;
};

/// Replaces the parsed value of every option named in the config file.
void apply_config(CLI::App& sub, const std::string& path) {
  std::map<std::string, std::string> values;
  try {
    values = parse_config_file(path);
  } catch (const std::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  for (const auto& [key, value] : values) {
    CLI::Option* option = nullptr;
    try {
      option = sub.get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError("config " + path + ": unknown key '" + key + "' for " + sub.get_name());
    }
    if (key == "config") throw UsageError("config " + path + ": nested config is not supported");
    option->clear();
    option->add_result(value);
    try {
      option->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("config " + path + ": " + key + ": " + e.what());
    }
  }
}

double dt_or(const Options& o, double fallback) { return o.dt > 0.0 ? o.dt : fallback; }

DegradationMode parse_mode(const std::string& mode) {
  return mode == "ld" ? DegradationMode::Linear : DegradationMode::Cycle;
}

EnvConfig env_config(const Options& o, double dt) {
  EnvConfig env;
  env.battery = BatteryParams::from_rating(o.power_kw, o.capacity_kwh, dt, o.soc_min, o.soc_max);
  env.cost.delta = o.delta;
  env.cost.degradation_scale = o.degradation_scale;
  env.cost.degradation = {o.alpha_d, o.beta};
  env.cost.mode = parse_mode(o.mode);
  env.cost.a_d = o.a_d;
  env.initial_soc = o.initial_soc;
  env.validate();
  return env;
}

SyntheticSpec synthetic_spec(const Options& o, std::uint64_t seed, double dt) {
  SyntheticSpec spec;
  spec.seed = seed;
  spec.dt_seconds = dt;
  spec.price_mean = o.price_mean;
  spec.price_amplitude = o.price_amplitude;
  spec.price_noise = o.price_noise;
  spec.fr_noise = o.fr_noise;
  return spec;
}

/// File stem without a leading "price_", so price_day3.csv becomes day3.
std::string day_id(const std::string& price_path) {
  std::string stem = fs::path(price_path).stem().string();
  if (stem.rfind("price_", 0) == 0 && stem.size() > 6) stem.erase(0, 6);
  return stem;
}

/// Profiles from paired --price/--fr files, or synthetic days.
std::vector<ProfilePtr> load_profiles(const Options& o, double dt) {
  std::vector<ProfilePtr> profiles;
  if (!o.price.empty() || !o.fr.empty()) {
    if (o.price.size() != o.fr.size()) {
      throw UsageError("--price and --fr must be given the same number of times");
    }
    for (std::size_t i = 0; i < o.price.size(); ++i) {
      profiles.push_back(
          std::make_shared<const MarketProfile>(load_profile(o.price[i], o.fr[i], dt, day_id(o.price[i]))));
    }
  } else if (o.synthetic_days > 0) {
    for (std::size_t i = 0; i < o.synthetic_days; ++i) {
      const std::string id = "synthetic" + std::to_string(i);
      profiles.push_back(std::make_shared<const MarketProfile>(
          synth_profile(synthetic_spec(o, o.seed + i, dt), id)));
    }
  } else {
    throw UsageError("no market data: pass --price/--fr or --synthetic-days");
  }
  return profiles;
}

std::ofstream open_output(const Options& o, const std::string& name) {
  fs::create_directories(o.out_dir);
  const fs::path path = fs::path(o.out_dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

int run_gen_data(const Options& o) {
  for (std::size_t d = 0; d < o.days; ++d) {
    const auto day = synth_profile(synthetic_spec(o, o.seed + d, kFrCadenceSeconds));
    const auto per_interval = static_cast<std::size_t>(kPriceIntervalSeconds / kFrCadenceSeconds);
    std::vector<double> price;
    for (std::size_t k = 0; k < day.price.size(); k += per_interval) price.push_back(day.price[k]);
    // Consecutive days starting 2024-01-01 00:00 UTC.
    const double start = 1704067200.0 + 86400.0 * static_cast<double>(d);
    const std::string tag = "day" + std::to_string(d) + ".csv";
    auto price_out = open_output(o, "price_" + tag);
    write_timed_csv(price_out, price, start, kPriceIntervalSeconds);
    auto fr_out = open_output(o, "fr_" + tag);
    write_timed_csv(fr_out, day.fr, start, kFrCadenceSeconds);
  }
  std::printf("wrote %zu days to %s\n", o.days, o.out_dir.c_str());
  return kOk;
}

int run_train(const Options& o) {
  const double dt = dt_or(o, 10.0);
  const auto profiles = load_profiles(o, dt);
  const EnvConfig env = env_config(o, dt);
  TrainConfig config;
  config.gamma = o.gamma;
  config.learning_rate = o.learning_rate;
  config.batch_size = o.batch_size;
  config.target_interval = o.target_interval;
  config.episodes = o.episodes;
  config.replay_capacity = o.replay_capacity;
  config.hidden = o.hidden;
  config.seed = o.seed;
  config.steps_per_episode = o.steps;
  if (config.steps_per_episode == 0) {
    config.steps_per_episode = profiles.front()->size();
    for (const auto& p : profiles) config.steps_per_episode = std::min(config.steps_per_episode, p->size());
  }

  BatteryTrainOptions options;
  const std::size_t every = std::max<std::size_t>(1, o.episodes / 20);
  options.on_episode = [&](const EpisodeTrace& t) {
    if ((t.episode + 1) % every == 0 || t.episode + 1 == o.episodes) {
      std::fprintf(stderr, "episode %zu/%zu  reward %.4f  cycle-scored %.4f  epsilon %.4f\n",
                   t.episode + 1, o.episodes, t.total_reward, t.cycle_total_reward(), t.epsilon);
    }
  };
  const auto result = train_battery(env, config, profiles, options);

  auto trace = open_output(o, "train_trace.csv");
  write_train_trace_csv(trace, result.trace);
  const std::string weights =
      o.weights.empty() ? (fs::path(o.out_dir) / "weights.bin").string() : o.weights;
  save_weights(result.params, weights);
  std::printf("trained %zu episodes of %zu steps (%s mode), weights in %s\n", o.episodes,
              config.steps_per_episode, o.mode.c_str(), weights.c_str());
  return kOk;
}

int run_evaluate(const Options& o) {
  if (o.weights.empty()) throw UsageError("evaluate needs --weights");
  const double dt = dt_or(o, kFrCadenceSeconds);
  const auto profiles = load_profiles(o, dt);
  const EnvConfig env = env_config(o, dt);
  if (env.cost.mode == DegradationMode::Linear && !(env.cost.a_d > 0.0)) {
    throw std::invalid_argument("ld scoring needs --a-d > 0");
  }
  const auto params = load_weights(o.weights);
  const auto reports = evaluate(params, profiles, env, true);

  auto out = open_output(o, "episode_reports.csv");
  write_episode_reports_csv(out, reports);
  auto factors = open_output(o, "degradation_factors.csv");
  factors << "profile_id,c_rate_factor,soc_stress\n";
  factors.precision(17);
  for (const auto& r : reports) {
    const auto f = degradation_factors(r);
    factors << r.profile_id << ',' << f.c_rate_factor << ',' << f.soc_stress << '\n';
    auto soc = open_output(o, "soc_trace_" + r.profile_id + ".csv");
    soc << "step,soc\n";
    soc.precision(17);
    for (std::size_t t = 0; t < r.soc_trace.size(); ++t) soc << t << ',' << r.soc_trace[t] << '\n';
    std::printf("%s: reward %.4f (h_e %.4f, h_f %.4f, h_d %.4f)\n", r.profile_id.c_str(),
                r.total_reward, r.energy_cost, r.fr_penalty, r.degradation_cost);
  }
  return kOk;
}

std::vector<EpisodeReport> read_reports(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_episode_reports_csv(in);
}

int run_compare(const Options& o) {
  if (o.cd_reports.empty() || o.ld_reports.empty()) {
    throw UsageError("compare needs --cd and --ld report files");
  }
  const auto cd = read_reports(o.cd_reports);
  const auto ld = read_reports(o.ld_reports);
  const auto stats = compare_cd_ld(cd, ld);
  auto out = open_output(o, "comparison.csv");
  write_comparison_csv(out, stats);
  auto days = open_output(o, "comparison_days.csv");
  write_comparison_days_csv(days, stats);
  std::printf("%zu days: mean %.4f, max %.4f, min %.4f, CD >= LD on %.1f%%\n",
              stats.reward_diffs.size(), stats.reward.mean, stats.reward.max, stats.reward.min,
              100.0 * stats.fraction_cd_ge_ld());
  return kOk;
}

int run_verify(const Options& o) {
  const DegradationParams params{o.alpha_d, o.beta};
  if (!o.trajectory.empty()) {
    std::ifstream in(o.trajectory);
    if (!in) throw std::runtime_error("cannot open " + o.trajectory);
    const auto traj = read_trajectory_csv(in);
    const auto result = rainflow_decompose(traj, params);
    CycleTracker tracker(params, traj.soc.front());
    double engine = 0.0;
    for (std::size_t t = 1; t < traj.soc.size(); ++t) engine += tracker.advance_to(traj.soc[t]);
    auto out = open_output(o, "cycles.csv");
    write_cycles_csv(out, result.cycles);
    const double deviation = relative_deviation(engine, result.total_cost);
    std::printf("trajectory: %zu cycles, oracle %.10e, engine %.10e, deviation %.3e\n",
                result.cycles.size(), result.total_cost, engine, deviation);
    if (!(deviation < 1e-9)) return kValidationFailure;
  }
  FuzzConfig config;
  config.walks = o.walks;
  config.length = o.length;
  config.seed = o.seed;
  config.params = params;
  config.soc_min = o.soc_min;
  config.soc_max = o.soc_max;
  config.rate = o.power_kw * dt_or(o, kPriceIntervalSeconds) / (3600.0 * o.capacity_kwh);
  const auto summary = verify_degradation(config);
  std::printf("%s: %zu walks x %zu steps, max relative deviation %.3e (walk %zu)\n",
              summary.passed ? "PASS" : "FAIL", summary.walks, config.length,
              summary.max_relative_deviation, summary.worst_walk);
  return summary.passed ? kOk : kValidationFailure;
}

int run_dp_oracle(const Options& o) {
  const double dt = dt_or(o, kPriceIntervalSeconds);
  const EnvConfig env = env_config(o, dt);
  std::vector<std::pair<std::string, std::vector<double>>> days;
  if (!o.price.empty()) {
    for (const auto& path : o.price) {
      const auto series = read_timed_csv_file(path);
      if (series.value.empty()) throw std::invalid_argument(path + ": empty price series");
      // Forward-fill onto the dt grid over the span the file covers.
      const double span = static_cast<double>(series.value.size()) * kPriceIntervalSeconds;
      const auto steps = static_cast<std::size_t>(span / dt);
      std::vector<double> price;
      for (std::size_t k = 0; k < steps; ++k) {
        price.push_back(series.value[static_cast<std::size_t>(k * dt / kPriceIntervalSeconds)]);
      }
      days.emplace_back(day_id(path), std::move(price));
    }
  } else {
    for (const auto& p : load_profiles(o, dt)) days.emplace_back(p->id, p->price);
  }
  auto out = open_output(o, "dp_oracle.csv");
  out << "profile_id,value\n";
  out.precision(17);
  for (const auto& [id, price] : days) {
    const auto result = dp_arbitrage_oracle(price, env.battery, o.grid, o.initial_soc, env.action_set);
    out << id << ',' << result.value << '\n';
    std::printf("%s: optimal arbitrage value %.4f over %zu steps\n", id.c_str(), result.value,
                price.size());
  }
  return kOk;
}

}  // namespace

int run(int argc, char** argv) {
  Options o;
  CLI::App app{"cycle-based battery degradation: data, DQN training and reports"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  const auto data_flags = [&](CLI::App* s) {
    s->add_option("--price", o.price, "price CSV (unix_epoch_seconds,value at 5 min); repeatable")
        ->delimiter(',');
    s->add_option("--fr", o.fr, "FR CSV (unix_epoch_seconds,value at 2 s); pairs with --price")
        ->delimiter(',');
    s->add_option("--synthetic-days", o.synthetic_days, "use N synthetic days instead of files");
    s->add_option("--price-mean", o.price_mean, "synthetic price mean ($/MWh)");
    s->add_option("--price-amplitude", o.price_amplitude, "synthetic daily price amplitude");
    s->add_option("--price-noise", o.price_noise, "synthetic AR(1) innovation scale");
    s->add_option("--fr-noise", o.fr_noise, "synthetic FR standard deviation");
  };
  const auto env_flags = [&](CLI::App* s) {
    s->add_option("--mode", o.mode, "degradation model")->check(CLI::IsMember({"cd", "ld"}));
    s->add_option("--power-kw", o.power_kw, "rated (dis)charge power");
    s->add_option("--capacity-kwh", o.capacity_kwh, "energy capacity");
    s->add_option("--soc-min", o.soc_min, "lower SoC bound");
    s->add_option("--soc-max", o.soc_max, "upper SoC bound");
    s->add_option("--initial-soc", o.initial_soc, "SoC at the start of each day");
    s->add_option("--delta", o.delta, "FR deviation penalty ($/MWh)");
    s->add_option("--degradation-scale", o.degradation_scale, "$ per unit of cycle cost");
    s->add_option("--alpha-d", o.alpha_d, "cycle cost coefficient");
    s->add_option("--beta", o.beta, "cycle cost depth exponent");
    s->add_option("--a-d", o.a_d, "linearized coefficient (ld mode; train fits it when 0)");
  };
  const auto common = [&](CLI::App* s) {
    s->add_option("--config", o.config, "key=value file; its values override flags");
    s->add_option("--out-dir", o.out_dir, "output directory");
    s->add_option("--seed", o.seed, "random seed");
    s->add_option("--dt", o.dt, "step length in seconds");
  };

  auto* gen = app.add_subcommand("gen-data", "write synthetic price and FR CSV files");
  common(gen);
  gen->add_option("--days", o.days, "number of days");
  gen->add_option("--price-mean", o.price_mean, "price mean ($/MWh)");
  gen->add_option("--price-amplitude", o.price_amplitude, "daily price amplitude");
  gen->add_option("--price-noise", o.price_noise, "AR(1) innovation scale");
  gen->add_option("--fr-noise", o.fr_noise, "FR standard deviation");

  auto* train = app.add_subcommand("train", "train a DQN policy");
  common(train);
  data_flags(train);
  env_flags(train);
  train->add_option("--weights", o.weights, "output weights file (default <out-dir>/weights.bin)");
  train->add_option("--episodes", o.episodes, "training episodes");
  train->add_option("--steps", o.steps, "steps per episode (default: whole day)");
  train->add_option("--gamma", o.gamma, "discount factor");
  train->add_option("--learning-rate", o.learning_rate, "Adam step size");
  train->add_option("--batch-size", o.batch_size, "minibatch size");
  train->add_option("--target-interval", o.target_interval, "steps between target syncs");
  train->add_option("--replay-capacity", o.replay_capacity, "replay buffer size");
  train->add_option("--hidden", o.hidden, "hidden layer widths")->delimiter(',');

  auto* eval = app.add_subcommand("evaluate", "greedy rollout of trained weights");
  common(eval);
  data_flags(eval);
  env_flags(eval);
  eval->add_option("--weights", o.weights, "weights file")->required();

  auto* compare = app.add_subcommand("compare", "CD vs LD statistics from two report files");
  common(compare);
  compare->add_option("--cd", o.cd_reports, "episode_reports.csv of the CD policy")->required();
  compare->add_option("--ld", o.ld_reports, "episode_reports.csv of the LD policy")->required();

  auto* verify = app.add_subcommand("verify-degradation", "engine vs rainflow fuzz check");
  common(verify);
  verify->add_option("--walks", o.walks, "number of random walks");
  verify->add_option("--length", o.length, "steps per walk");
  verify->add_option("--trajectory", o.trajectory, "also decompose this SoC CSV");
  verify->add_option("--alpha-d", o.alpha_d, "cycle cost coefficient");
  verify->add_option("--beta", o.beta, "cycle cost depth exponent");
  verify->add_option("--power-kw", o.power_kw, "rated power (sets the step bound)");
  verify->add_option("--capacity-kwh", o.capacity_kwh, "energy capacity");
  verify->add_option("--soc-min", o.soc_min, "lower SoC bound");
  verify->add_option("--soc-max", o.soc_max, "upper SoC bound");

  auto* dp = app.add_subcommand("dp-oracle", "optimal pure-arbitrage value by dynamic programming");
  common(dp);
  data_flags(dp);
  env_flags(dp);
  dp->add_option("--grid", o.grid, "SoC grid step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    if (!o.config.empty()) apply_config(*chosen, o.config);
    const std::string name = chosen->get_name();
    if (name == "gen-data") return run_gen_data(o);
    if (name == "train") return run_train(o);
    if (name == "evaluate") return run_evaluate(o);
    if (name == "compare") return run_compare(o);
    if (name == "verify-degradation") return run_verify(o);
    return run_dp_oracle(o);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsageError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidationFailure;
  }
}

}  // namespace cyclerl::cli

int main(int argc, char** argv) { return cyclerl::cli::run(argc, argv); }
