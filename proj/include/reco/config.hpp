// Copyright 2026 The reco Authors
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
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "reco/gravity.hpp"
#include "reco/similarity.hpp"

namespace reco {

/// Declarative run configuration: a flat set of known keys with defaults.
///
/// Files hold "key = value" lines; '#' starts a comment. Later assignments
/// win, so flags applied after load() override the file.
class RunConfig {
public:
  RunConfig();

  static RunConfig load(const std::filesystem::path &path);
  /// Throws UsageError naming the source line.
  void parse(std::string_view text, std::string_view source = "<config>");

  /// Throws UsageError for an unknown key.
  void set(const std::string &key, std::string value);
  const std::string &get(std::string_view key) const;
  bool has_value(std::string_view key) const { return !get(key).empty(); }

  double get_double(std::string_view key) const;
  long long get_int(std::string_view key) const;
  std::uint64_t get_u64(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  std::vector<std::string> get_list(std::string_view key) const;

  /// Every key, sorted, one "key=value" per line.
  std::string resolved() const;
  /// Over every key except output and workers.
  std::uint64_t hash() const;

  static const std::map<std::string, std::string, std::less<>> &known_keys();

  Scale scale() const;
  LogFormat format() const;
  GravityParams gravity() const;
  KnnOptions knn() const;
  /// Checks every typed key once.
  void validate() const;

private:
  std::map<std::string, std::string, std::less<>> values_;
};

} // namespace reco
