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

#ifndef CYCLERL_CYCLERL_HPP_
#define CYCLERL_CYCLERL_HPP_

#include "cyclerl/battery_env.hpp"
#include "cyclerl/config_file.hpp"
#include "cyclerl/cycle_tracker.hpp"
#include "cyclerl/dqn.hpp"
#include "cyclerl/market_data.hpp"
#include "cyclerl/q_network.hpp"
#include "cyclerl/rainflow.hpp"
#include "cyclerl/rainflow_io.hpp"
#include "cyclerl/replay_buffer.hpp"
#include "cyclerl/report.hpp"
#include "cyclerl/weights_io.hpp"

#endif  // CYCLERL_CYCLERL_HPP_
