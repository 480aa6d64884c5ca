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

// Offline rainflow cycle counting over a full state-of-charge trajectory.
//
// The decomposition here is the reference against which the online
// CycleTracker is checked: a half-stroke of depth d costs
// phi(d) - phi(0), and a full cycle is two half-strokes of equal depth.

#ifndef CYCLERL_RAINFLOW_HPP_
#define CYCLERL_RAINFLOW_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cyclerl {

/// Coefficients of the exponential cycle-depth stress model
/// phi(d) = alpha_d * exp(beta * d).
struct DegradationParams {
  double alpha_d = 4.5e-3;
  double beta = 1.3;

  void validate() const {
    if (!(alpha_d > 0.0) || !std::isfinite(alpha_d)) {
      throw std::invalid_argument("DegradationParams: alpha_d must be > 0");
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
      throw std::invalid_argument("DegradationParams: beta must be > 0");
    }
  }
};

namespace detail {

inline double phi(double depth, const DegradationParams& params) {
  return params.alpha_d * std::exp(params.beta * depth);
}

// phi(d) - phi(0), evaluated without cancellation.
inline double phi_excess(double depth, const DegradationParams& params) {
  return params.alpha_d * std::expm1(params.beta * depth);
}

}  // namespace detail

/// Cost of a single cycle of normalized depth `depth`.
/// Throws std::domain_error when depth is outside [0, 1].
inline double cycle_cost(double depth, const DegradationParams& params) {
  if (!(depth >= 0.0 && depth <= 1.0)) {
    throw std::domain_error("cycle_cost: depth must lie in [0, 1], got " +
                            std::to_string(depth));
  }
  return detail::phi(depth, params);
}

struct SocTrajectory {
  std::vector<double> soc;
  double dt_seconds = 1.0;

  void validate() const {
    if (soc.empty()) {
      throw std::invalid_argument("SocTrajectory: trajectory is empty");
    }
    if (!(dt_seconds > 0.0)) {
      throw std::invalid_argument("SocTrajectory: dt_seconds must be > 0");
    }
    for (std::size_t i = 0; i < soc.size(); ++i) {
      if (!(soc[i] >= 0.0 && soc[i] <= 1.0)) {
        throw std::invalid_argument("SocTrajectory: value at index " +
                                    std::to_string(i) + " is outside [0, 1]");
      }
    }
  }
};

enum class CycleKind { Full, Half };

inline const char* to_string(CycleKind kind) {
  return kind == CycleKind::Full ? "full" : "half";
}

struct CycleRecord {
  CycleKind kind = CycleKind::Half;
  double depth = 0.0;
  std::size_t start_index = 0;
  std::size_t end_index = 0;

  friend bool operator==(const CycleRecord&, const CycleRecord&) = default;
};

struct RainflowResult {
  std::vector<CycleRecord> cycles;
  double total_cost = 0.0;
  double throughput = 0.0;
};

struct TurningPoint {
  std::size_t index = 0;
  double soc = 0.0;

  friend bool operator==(const TurningPoint&, const TurningPoint&) = default;
};

/// Local extrema of the series, including both endpoints. Plateaus collapse
/// onto their first sample; monotone runs collapse onto their endpoints.
inline std::vector<TurningPoint> extract_turning_points(
    std::span<const double> soc) {
  std::vector<TurningPoint> points;
  if (soc.empty()) return points;
  points.push_back({0, soc[0]});
  int direction = 0;
  for (std::size_t i = 1; i < soc.size(); ++i) {
    const double value = soc[i];
    const double last = points.back().soc;
    if (value == last) continue;
    const int step_direction = value > last ? 1 : -1;
    if (points.size() >= 2 && step_direction == direction) {
      points.back() = {i, value};
    } else {
      points.push_back({i, value});
      direction = step_direction;
    }
  }
  return points;
}

inline std::vector<TurningPoint> extract_turning_points(
    const SocTrajectory& traj) {
  return extract_turning_points(std::span<const double>(traj.soc));
}

/// Sum of |soc[t+1] - soc[t]| over raw steps.
inline double throughput(std::span<const double> soc) {
  double total = 0.0;
  for (std::size_t i = 1; i < soc.size(); ++i) {
    total += std::abs(soc[i] - soc[i - 1]);
  }
  return total;
}

/// Four-point rainflow count. Cycles are returned in extraction order
/// (full cycles first as they close, then the residual half cycles).
inline std::vector<CycleRecord> rainflow_cycles(std::span<const double> soc) {
  const auto points = extract_turning_points(soc);
  std::vector<CycleRecord> cycles;
  std::vector<TurningPoint> stack;
  stack.reserve(points.size());
  for (const auto& point : points) {
    stack.push_back(point);
    while (stack.size() >= 4) {
      const std::size_t n = stack.size();
      const double outer_before = std::abs(stack[n - 3].soc - stack[n - 4].soc);
      const double inner = std::abs(stack[n - 2].soc - stack[n - 3].soc);
      const double outer_after = std::abs(stack[n - 1].soc - stack[n - 2].soc);
      if (inner > outer_before || inner > outer_after) break;
      cycles.push_back({CycleKind::Full, inner, stack[n - 3].index,
                        stack[n - 2].index});
      stack.erase(stack.end() - 3, stack.end() - 1);
    }
  }
  for (std::size_t i = 1; i < stack.size(); ++i) {
    cycles.push_back({CycleKind::Half,
                      std::abs(stack[i].soc - stack[i - 1].soc),
                      stack[i - 1].index, stack[i].index});
  }
  return cycles;
}

/// Cost of a cycle list under the half-stroke convention: each half-stroke
/// of depth d contributes phi(d) - phi(0); a full cycle is two half-strokes.
inline double half_stroke_cost(std::span<const CycleRecord> cycles,
                               const DegradationParams& params) {
  double total = 0.0;
  for (const auto& cycle : cycles) {
    const double cost = detail::phi_excess(cycle.depth, params);
    total += cycle.kind == CycleKind::Full ? 2.0 * cost : cost;
  }
  return total;
}

inline RainflowResult rainflow_decompose(const SocTrajectory& traj,
                                         const DegradationParams& params) {
  traj.validate();
  params.validate();
  RainflowResult result;
  result.cycles = rainflow_cycles(traj.soc);
  result.total_cost = half_stroke_cost(result.cycles, params);
  result.throughput = throughput(traj.soc);
  return result;
}

/// Average cost per unit of SoC throughput over a sample trajectory, using
/// phi(d) literally (no phi(0) offset) once per half-stroke.
/// Throws std::domain_error for a trajectory without throughput.
inline double linearized_coefficient(const SocTrajectory& traj,
                                     const DegradationParams& params) {
  const auto result = rainflow_decompose(traj, params);
  if (!(result.throughput > 0.0)) {
    throw std::domain_error(
        "linearized_coefficient: trajectory has zero throughput");
  }
  double numerator = 0.0;
  for (const auto& cycle : result.cycles) {
    const double cost = detail::phi(cycle.depth, params);
    numerator += cycle.kind == CycleKind::Full ? 2.0 * cost : cost;
  }
  return numerator / result.throughput;
}

}  // namespace cyclerl

#endif  // CYCLERL_RAINFLOW_HPP_
