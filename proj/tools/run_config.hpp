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

// Flat `module.key = value` run configuration for the command-line tool.

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace twinbeam::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BandSpec {
  double lo_hz = 0.0;
  double hi_hz = 0.0;
};

class RunConfig {
 public:
  /// Built-in defaults; identical to config/defaults.conf.
  static RunConfig defaults();

  /// Overlays the keys of a file onto this configuration. Unknown keys,
  /// duplicate keys and malformed lines raise ConfigError with file and line.
  void merge_file(const std::string& path);
  void merge_text(const std::string& text, const std::string& origin);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  /// Whitespace-separated list of numbers.
  std::vector<double> get_doubles(const std::string& key) const;
  /// Comma-separated `lo:hi` bands; the literal `none` is the empty list.
  std::vector<BandSpec> get_bands(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

double parse_double(const std::string& text, const std::string& what);
long long parse_int(const std::string& text, const std::string& what);
BandSpec parse_band(const std::string& text, const std::string& what);

}  // namespace twinbeam::cli
