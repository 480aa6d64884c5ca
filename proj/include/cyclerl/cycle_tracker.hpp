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

// Online switching-point tracker emitting per-step cycle degradation.
//
// The tracker keeps a stack of switching points (SPs) whose ranges strictly
// shrink toward the top. Each step extends the stroke that starts at the top
// SP and charges phi(|c_new - top|) - phi(|c_old - top|). When the stroke
// reaches the range of the enclosed stroke below it, that stroke is closed
// on the spot and the increment is split at the crossing level, so the
// running total always equals the rainflow cost of the trajectory so far.

#ifndef CYCLERL_CYCLE_TRACKER_HPP_
#define CYCLERL_CYCLE_TRACKER_HPP_

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclerl/rainflow.hpp"

namespace cyclerl {

/// The last three switching points, oldest first.
struct SpTriple {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  friend bool operator==(const SpTriple&, const SpTriple&) = default;
};

class CycleTracker {
 public:
  explicit CycleTracker(DegradationParams params = {}, double initial_soc = 0.5,
                        std::optional<std::size_t> sp_cap = std::nullopt)
      : params_(params), sp_cap_(sp_cap) {
    params_.validate();
    if (sp_cap_ && *sp_cap_ < 2) {
      throw std::invalid_argument("CycleTracker: sp_cap must be >= 2");
    }
    reset(initial_soc);
  }

  void reset(double initial_soc) {
    if (!(initial_soc >= 0.0 && initial_soc <= 1.0)) {
      throw std::domain_error("CycleTracker::reset: SoC must lie in [0, 1], got " +
                              std::to_string(initial_soc));
    }
    stack_.assign(1, initial_soc);
    current_soc_ = initial_soc;
    accumulated_cost_ = 0.0;
  }

  /// Applies an SoC change of `b` and returns the degradation increment.
  /// The caller keeps current_soc() + b inside [0, 1].
  double step(double b) { return advance_to(current_soc_ + b); }

  /// Moves the SoC to `target` and returns the degradation increment.
  double advance_to(double target) {
    const double delta = target - current_soc_;
    if (delta == 0.0) return 0.0;

    if (delta * (current_soc_ - stack_.back()) < 0.0) stack_.push_back(current_soc_);

    double base = current_soc_;
    double increment = 0.0;
    while (stack_.size() >= 2) {
      const double top = stack_.back();
      const double level = stack_[stack_.size() - 2];
      if (std::abs(target - top) < std::abs(level - top)) break;
      increment += phi(level, top) - phi(base, top);
      if (stack_.size() >= 3) {
        // Full cycle between `level` and `top` closes at the crossing.
        stack_.resize(stack_.size() - 2);
      } else {
        // Stroke outgrows the oldest one; that one stays a half cycle.
        stack_.erase(stack_.begin());
      }
      base = level;
    }
    const double top = stack_.back();
    increment += phi(target, top) - phi(base, top);

    // The cap is applied once closures are settled, so a push that is
    // closed within the same step never costs history.
    if (sp_cap_ && stack_.size() > *sp_cap_) {
      stack_.erase(stack_.begin(), stack_.end() - static_cast<std::ptrdiff_t>(*sp_cap_));
    }
    current_soc_ = target;
    accumulated_cost_ += increment;
    return increment;
  }

  /// The three most recent SPs, left-padded with the oldest entry.
  SpTriple observe_sps() const {
    const std::size_t n = stack_.size();
    const auto at = [&](std::size_t from_top) {
      return from_top < n ? stack_[n - 1 - from_top] : stack_.front();
    };
    return {at(2), at(1), at(0)};
  }

  std::span<const double> sp_stack() const { return stack_; }
  double current_soc() const { return current_soc_; }
  double accumulated_cost() const { return accumulated_cost_; }
  const DegradationParams& params() const { return params_; }
  std::optional<std::size_t> sp_cap() const { return sp_cap_; }

 private:
  double phi(double soc, double reference) const {
    return detail::phi(std::abs(soc - reference), params_);
  }

  DegradationParams params_;
  std::optional<std::size_t> sp_cap_;
  std::vector<double> stack_;
  double current_soc_ = 0.0;
  double accumulated_cost_ = 0.0;
};

}  // namespace cyclerl

#endif  // CYCLERL_CYCLE_TRACKER_HPP_
