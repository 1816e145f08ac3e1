// Copyright 2026 The twinbeam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace twinbeam::cli {
namespace {

constexpr const char* kDefaults = R"(
fock_engine.cutoff = 16
hom.theta_rad = 0.39269908169872414
opo_spectra.s0_dbm = -79
opo_spectra.xi = 0.72
opo_spectra.delta_hz = 2.98e6
opo_spectra.grid_hz = 0.5e6 10e6 30e3
opo_spectra.units = dbm
trace_fit.fit_window_hz = 2e6 inf
trace_fit.exclusions_hz = 3.8e6:4.0e6
trace_fit.weighting = db
trace_fit.max_iterations = 200
trace_fit.convergence_tol = 1e-10
trace_fit.initial_damping = 1e-3
trace_fit.damping_factor = 10
uncertainty.u_grid = 0.1 5 0.1
synth.noise_db = 0.2
synth.seed = 1
synth.rbw_hz = 30e3
)";

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> out;
    std::istringstream in(kDefaults);
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) out.insert(trim(line.substr(0, eq)));
    }
    return out;
  }();
  return keys;
}

}  // namespace

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (!t.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (t.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(what + ": expected a number, got '" + t + "'");
  }
  return value;
}

long long parse_int(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(what + ": expected an integer, got '" + t + "'");
  }
  return value;
}

BandSpec parse_band(const std::string& text, const std::string& what) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ConfigError(what + ": expected lo:hi, got '" + trim(text) + "'");
  }
  return {parse_double(text.substr(0, colon), what),
          parse_double(text.substr(colon + 1), what)};
}

RunConfig RunConfig::defaults() {
  RunConfig config;
  config.merge_text(kDefaults, "<defaults>");
  return config;
}

void RunConfig::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigFileError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  merge_text(text.str(), path);
}

void RunConfig::merge_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = origin + ":" + std::to_string(number);
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (known_keys().count(key) == 0) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ConfigError(where + ": duplicate key '" + key + "'");
    }
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    values_[key] = value;
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (known_keys().count(key) == 0) {
    throw ConfigError("unknown key '" + key + "'");
  }
  values_[key] = value;
}

std::string RunConfig::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key '" + key + "'");
  return it->second;
}

double RunConfig::get_double(const std::string& key) const {
  return parse_double(get_string(key), key);
}

long long RunConfig::get_int(const std::string& key) const {
  return parse_int(get_string(key), key);
}

std::vector<double> RunConfig::get_doubles(const std::string& key) const {
  std::istringstream in(get_string(key));
  std::vector<double> out;
  std::string token;
  while (in >> token) out.push_back(parse_double(token, key));
  return out;
}

std::vector<BandSpec> RunConfig::get_bands(const std::string& key) const {
  const std::string text = get_string(key);
  std::vector<BandSpec> out;
  if (trim(text) == "none") return out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_band(item, key));
  }
  return out;
}

}  // namespace twinbeam::cli
