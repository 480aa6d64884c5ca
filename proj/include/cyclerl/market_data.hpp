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

// Price / regulation-signal profiles: CSV ingestion, resampling onto a
// common step grid, and a seeded synthetic generator.
//
// CSV schema for both inputs: a one-line header followed by
// `unix_epoch_seconds,value` rows with strictly increasing timestamps.
// Prices arrive at a 300 s cadence, regulation signal at 2 s.

#ifndef CYCLERL_MARKET_DATA_HPP_
#define CYCLERL_MARKET_DATA_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cyclerl {

inline constexpr double kPriceIntervalSeconds = 300.0;
inline constexpr double kFrCadenceSeconds = 2.0;

/// Exogenous inputs for one episode, stepped at dt_seconds.
struct MarketProfile {
  std::string id;
  double dt_seconds = kPriceIntervalSeconds;
  std::vector<double> price;  // $/MWh
  std::vector<double> fr;     // normalized to [-1, 1]

  std::size_t size() const { return price.size(); }

  void validate() const {
    if (!(dt_seconds > 0.0)) {
      throw std::invalid_argument("MarketProfile: dt_seconds must be > 0");
    }
    if (price.size() != fr.size()) {
      throw std::invalid_argument("MarketProfile: price and fr lengths differ");
    }
    if (price.empty()) throw std::invalid_argument("MarketProfile: empty profile");
    for (std::size_t i = 0; i < price.size(); ++i) {
      if (!std::isfinite(price[i])) {
        throw std::invalid_argument("MarketProfile: non-finite price at step " +
                                    std::to_string(i));
      }
      if (!(fr[i] >= -1.0 && fr[i] <= 1.0)) {
        throw std::invalid_argument("MarketProfile: fr outside [-1, 1] at step " +
                                    std::to_string(i));
      }
    }
  }
};

/// Malformed input; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct TimedSeries {
  std::vector<double> time;
  std::vector<double> value;
};

namespace detail {

inline std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

inline double parse_finite(const std::string& field, std::size_t line) {
  const std::string text = trim(field);
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &consumed);
  } catch (const std::exception&) {
    throw ParseError("cannot parse number '" + text + "'", line);
  }
  if (consumed != text.size()) {
    throw ParseError("trailing characters in '" + text + "'", line);
  }
  if (!std::isfinite(value)) throw ParseError("non-finite value", line);
  return value;
}

inline bool looks_numeric(const std::string& line) {
  const std::string text = trim(line);
  if (text.empty()) return false;
  const char c = text.front();
  return (c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.';
}

}  // namespace detail

/// Reads `unix_epoch_seconds,value` rows after a one-line header.
inline TimedSeries read_timed_csv(std::istream& in) {
  TimedSeries series;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) return series;
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError("expected 'timestamp,value'", line_no);
    }
    if (line.find(',', comma + 1) != std::string::npos) {
      throw ParseError("too many fields", line_no);
    }
    const double t = detail::parse_finite(line.substr(0, comma), line_no);
    const double v = detail::parse_finite(line.substr(comma + 1), line_no);
    if (!series.time.empty() && !(t > series.time.back())) {
      throw ParseError("timestamps must be strictly increasing", line_no);
    }
    series.time.push_back(t);
    series.value.push_back(v);
  }
  return series;
}

inline TimedSeries read_timed_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_timed_csv(in);
}

inline void write_timed_csv(std::ostream& out, std::span<const double> values,
                            double start_epoch, double cadence_seconds) {
  out << "unix_epoch_seconds,value\n";
  out.precision(17);
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << static_cast<std::int64_t>(std::llround(start_epoch + i * cadence_seconds))
        << ',' << values[i] << '\n';
  }
}

/// Mean over consecutive windows; a trailing partial window is dropped.
inline std::vector<double> resample_fr(std::span<const double> fr,
                                       std::size_t window = 5) {
  if (fr.empty()) throw std::invalid_argument("resample_fr: empty input");
  if (window == 0) throw std::invalid_argument("resample_fr: window must be > 0");
  std::vector<double> out;
  out.reserve(fr.size() / window);
  for (std::size_t start = 0; start + window <= fr.size(); start += window) {
    double sum = 0.0;
    for (std::size_t k = 0; k < window; ++k) sum += fr[start + k];
    out.push_back(std::clamp(sum / static_cast<double>(window), -1.0, 1.0));
  }
  return out;
}

namespace detail {

inline void check_cadence(const TimedSeries& series, double cadence,
                          const char* name) {
  for (std::size_t i = 1; i < series.time.size(); ++i) {
    if (std::abs(series.time[i] - series.time[i - 1] - cadence) > 1e-6) {
      throw ParseError(std::string(name) + " cadence mismatch: expected " +
                           std::to_string(cadence) + " s between rows",
                       i + 2);
    }
  }
}

}  // namespace detail

/// Aligns a 5-minute price series and a 2-second FR series onto a
/// `target_dt` grid. FR is window-averaged, price forward-filled.
inline MarketProfile load_profile(const TimedSeries& price,
                                  const TimedSeries& fr, double target_dt,
                                  std::string id = {}) {
  if (price.time.empty()) throw std::invalid_argument("load_profile: empty price series");
  if (fr.time.empty()) throw std::invalid_argument("load_profile: empty FR series");
  detail::check_cadence(price, kPriceIntervalSeconds, "price");
  detail::check_cadence(fr, kFrCadenceSeconds, "FR");
  const double ratio = target_dt / kFrCadenceSeconds;
  const auto window = static_cast<std::size_t>(std::llround(ratio));
  if (window == 0 || std::abs(ratio - static_cast<double>(window)) > 1e-9) {
    throw std::invalid_argument("load_profile: target_dt must be a multiple of 2 s");
  }
  for (std::size_t i = 0; i < fr.value.size(); ++i) {
    if (!(fr.value[i] >= -1.0 && fr.value[i] <= 1.0)) {
      throw ParseError("FR value outside [-1, 1]", i + 2);
    }
  }

  MarketProfile profile;
  profile.id = std::move(id);
  profile.dt_seconds = target_dt;
  profile.fr = resample_fr(fr.value, window);
  if (profile.fr.empty()) {
    throw std::invalid_argument("load_profile: FR series shorter than one step");
  }
  profile.price.reserve(profile.fr.size());
  const double start = fr.time.front();
  const double price_end = price.time.back() + kPriceIntervalSeconds;
  std::size_t row = 0;
  for (std::size_t k = 0; k < profile.fr.size(); ++k) {
    const double t = start + static_cast<double>(k) * target_dt;
    if (t < price.time.front() || t >= price_end) {
      throw std::invalid_argument("load_profile: price series does not cover step " +
                                  std::to_string(k));
    }
    while (row + 1 < price.time.size() && price.time[row + 1] <= t) ++row;
    profile.price.push_back(price.value[row]);
  }
  return profile;
}

inline MarketProfile load_profile(const std::string& price_csv,
                                  const std::string& fr_csv, double target_dt,
                                  std::string id = {}) {
  return load_profile(read_timed_csv_file(price_csv), read_timed_csv_file(fr_csv),
                      target_dt, std::move(id));
}

/// Daily price shape plus AR(1) noise per price interval; white FR noise.
struct SyntheticSpec {
  std::uint64_t seed = 1;
  double day_seconds = 86400.0;
  double dt_seconds = kPriceIntervalSeconds;
  double price_mean = 40.0;
  double price_amplitude = 25.0;
  double peak_hour = 17.0;
  double price_ar = 0.8;
  double price_noise = 5.0;
  double fr_noise = 0.4;

  void validate() const {
    if (!(dt_seconds > 0.0) || !(day_seconds >= dt_seconds)) {
      throw std::invalid_argument("SyntheticSpec: need 0 < dt_seconds <= day_seconds");
    }
    if (!(price_noise >= 0.0) || !(fr_noise >= 0.0)) {
      throw std::invalid_argument("SyntheticSpec: noise scales must be >= 0");
    }
    if (!(price_ar >= 0.0 && price_ar < 1.0)) {
      throw std::invalid_argument("SyntheticSpec: price_ar must lie in [0, 1)");
    }
  }
};

/// Noise-free daily price level at `seconds` into the day.
inline double daily_price_shape(const SyntheticSpec& spec, double seconds) {
  const double hour = seconds / 3600.0;
  return spec.price_mean +
         spec.price_amplitude *
             std::cos(2.0 * std::numbers::pi * (hour - spec.peak_hour) / 24.0);
}

inline MarketProfile synth_profile(const SyntheticSpec& spec, std::string id = {}) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const auto steps = static_cast<std::size_t>(spec.day_seconds / spec.dt_seconds);
  MarketProfile profile;
  profile.id = std::move(id);
  profile.dt_seconds = spec.dt_seconds;
  profile.price.reserve(steps);
  profile.fr.reserve(steps);

  // Price noise evolves once per market interval and holds in between.
  std::int64_t interval = -1;
  double ar_state = 0.0;
  double interval_price = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * spec.dt_seconds;
    const auto this_interval =
        static_cast<std::int64_t>(std::floor(t / kPriceIntervalSeconds));
    if (this_interval != interval) {
      interval = this_interval;
      ar_state = spec.price_ar * ar_state + spec.price_noise * normal(rng);
      interval_price =
          daily_price_shape(spec, static_cast<double>(interval) * kPriceIntervalSeconds) +
          ar_state;
    }
    profile.price.push_back(interval_price);
  }
  for (std::size_t k = 0; k < steps; ++k) {
    profile.fr.push_back(std::clamp(spec.fr_noise * normal(rng), -1.0, 1.0));
  }
  return profile;
}

}  // namespace cyclerl

#endif  // CYCLERL_MARKET_DATA_HPP_
