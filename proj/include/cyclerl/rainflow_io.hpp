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

#ifndef CYCLERL_RAINFLOW_IO_HPP_
#define CYCLERL_RAINFLOW_IO_HPP_

#include <istream>
#include <ostream>
#include <span>
#include <string>

#include "cyclerl/market_data.hpp"
#include "cyclerl/rainflow.hpp"

namespace cyclerl {

/// Accepts one SoC value per line or `t,soc` pairs. A first line that does
/// not start with a number is treated as a header. With `t,soc` rows the
/// step length is taken from the first two timestamps.
inline SocTrajectory read_trajectory_csv(std::istream& in) {
  SocTrajectory traj;
  std::vector<double> times;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = detail::trim(line);
    if (text.empty()) continue;
    if (line_no == 1 && !detail::looks_numeric(text)) continue;
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
      traj.soc.push_back(detail::parse_finite(text, line_no));
    } else {
      times.push_back(detail::parse_finite(text.substr(0, comma), line_no));
      traj.soc.push_back(detail::parse_finite(text.substr(comma + 1), line_no));
    }
    const double value = traj.soc.back();
    if (!(value >= 0.0 && value <= 1.0)) throw ParseError("SoC outside [0, 1]", line_no);
  }
  if (traj.soc.empty()) throw ParseError("trajectory is empty", 0);
  if (times.size() >= 2) {
    traj.dt_seconds = times[1] - times[0];
    if (!(traj.dt_seconds > 0.0)) throw ParseError("timestamps must increase", 0);
  }
  return traj;
}

inline void write_cycles_csv(std::ostream& out, std::span<const CycleRecord> cycles) {
  out << "kind,depth,start,end\n";
  out.precision(17);
  for (const auto& cycle : cycles) {
    out << to_string(cycle.kind) << ',' << cycle.depth << ',' << cycle.start_index << ','
        << cycle.end_index << '\n';
  }
}

}  // namespace cyclerl

#endif  // CYCLERL_RAINFLOW_IO_HPP_
