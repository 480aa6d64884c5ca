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

#ifndef CYCLERL_CONFIG_FILE_HPP_
#define CYCLERL_CONFIG_FILE_HPP_

#include <fstream>
#include <istream>
#include <map>
#include <string>

#include "cyclerl/market_data.hpp"

namespace cyclerl {

/// Line-based `key=value` settings. Blank lines and lines starting with
/// '#' are skipped; later keys win.
inline std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
    std::string key = detail::trim(text.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", line_no);
    // Accept `--key=value` so a config file can mirror the CLI spelling.
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    values[key] = detail::trim(text.substr(eq + 1));
  }
  return values;
}

inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return parse_config(in);
}

}  // namespace cyclerl

#endif  // CYCLERL_CONFIG_FILE_HPP_
