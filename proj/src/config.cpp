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
#include "reco/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "text.hpp"

namespace reco {

const std::map<std::string, std::string, std::less<>> &RunConfig::known_keys() {
  static const std::map<std::string, std::string, std::less<>> keys = {
      {"data.ratings", ""},
      {"data.format", "tsv"},
      {"data.catalog", ""},
      {"data.catalog_format", "tsv"},
      {"scale", "1,5"},
      {"split.test_fraction", "0.1"},
      {"split.folds", "0"},
      {"split.mode", "per-user"},
      {"split.seed", "7"},
      {"model", "default"},
      {"knn.measure", "weighted-pearson"},
      {"knn.k", "200"},
      {"knn.scoring", "mean-based"},
      {"gravity.factors", "16"},
      {"gravity.alpha", "0.03"},
      {"gravity.lambda", "0.008"},
      {"gravity.max_epochs", "200"},
      {"gravity.patience", "3"},
      {"gravity.wall_clock", ""},
      {"gravity.validation_fraction", "0.005"},
      {"gravity.seed", "11"},
      {"gravity.clamp", "1"},
      {"gravity.init_range", "0.01"},
      {"gravity.bias", "true"},
      {"emulated.k", "100"},
      {"emulated.measure", "pearson"},
      {"hybrid.w", "0.5"},
      {"random.seed", "3"},
      {"eval.tasks", "decide,compare,discover,explore"},
      {"eval.n", "10"},
      {"eval.segments", "true"},
      {"topn.seeds", "10"},
      {"topn.candidates", "100"},
      {"topn.diversity", "1"},
      {"topn.tail", "any"},
      {"topn.head_fraction", "0.2"},
      {"topn.recency", "any"},
      {"topn.seed", "0"},
      {"coldstart.regime", "long"},
      {"coldstart.counts", ""},
      {"coldstart.seed", "5"},
      {"workers", "0"},
      {"output", ""},
  };
  return keys;
}

RunConfig::RunConfig() {
  for (const auto &[k, v] : known_keys())
    values_.emplace(k, v);
}

RunConfig RunConfig::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw UsageError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c;
  c.parse(ss.str(), path.string());
  return c;
}

void RunConfig::parse(std::string_view body, std::string_view source) {
  std::size_t lineno = 0;
  for (auto raw : text::split(body, "\n")) {
    ++lineno;
    auto line = raw.substr(0, raw.find('#'));
    line = text::trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw UsageError(std::string(source) + ":" + std::to_string(lineno) +
                       ": expected key = value");
    const std::string key(text::trim(line.substr(0, eq)));
    try {
      set(key, std::string(text::trim(line.substr(eq + 1))));
    } catch (const UsageError &e) {
      throw UsageError(std::string(source) + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void RunConfig::set(const std::string &key, std::string value) {
  auto it = values_.find(key);
  if (it == values_.end())
    throw UsageError("unknown configuration key '" + key + "'");
  it->second = std::move(value);
}

const std::string &RunConfig::get(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    throw UsageError("unknown configuration key '" + std::string(key) + "'");
  return it->second;
}

double RunConfig::get_double(std::string_view key) const {
  const auto v = text::parse_double(get(key));
  if (!v)
    throw UsageError(std::string(key) + ": expected a number, got '" + get(key) + "'");
  return *v;
}

long long RunConfig::get_int(std::string_view key) const {
  const auto v = text::parse_int(get(key));
  if (!v)
    throw UsageError(std::string(key) + ": expected an integer, got '" + get(key) + "'");
  return *v;
}

std::uint64_t RunConfig::get_u64(std::string_view key) const {
  const long long v = get_int(key);
  if (v < 0)
    throw UsageError(std::string(key) + ": expected a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

bool RunConfig::get_bool(std::string_view key) const {
  const std::string &v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on")
    return true;
  if (v == "false" || v == "0" || v == "no" || v == "off")
    return false;
  throw UsageError(std::string(key) + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> RunConfig::get_list(std::string_view key) const {
  std::vector<std::string> out;
  for (auto f : text::split(get(key), ","))
    if (auto t = text::trim(f); !t.empty())
      out.emplace_back(t);
  return out;
}

std::string RunConfig::resolved() const {
  std::string out;
  for (const auto &[k, v] : values_)
    out += k + "=" + v + "\n";
  return out;
}

std::uint64_t RunConfig::hash() const {
  // Where results go and how many threads compute them do not change them.
  Fingerprint f;
  for (const auto &[k, v] : values_)
    if (k != "output" && k != "workers")
      f.update(k + "=" + v + "\n");
  return f.value();
}

Scale RunConfig::scale() const {
  const auto parts = get_list("scale");
  std::optional<double> lo, hi;
  if (parts.size() == 2) {
    lo = text::parse_double(parts[0]);
    hi = text::parse_double(parts[1]);
  }
  if (!lo || !hi || !(*lo < *hi))
    throw UsageError("scale: expected 'a,b' with a < b, got '" + get("scale") + "'");
  return {*lo, *hi};
}

LogFormat RunConfig::format() const {
  const std::string &f = get("data.format");
  if (f == "tsv")
    return LogFormat::Tsv;
  if (f == "movielens")
    return LogFormat::MovieLens;
  throw UsageError("data.format: expected tsv or movielens, got '" + f + "'");
}

GravityParams RunConfig::gravity() const {
  GravityParams p;
  p.factors = static_cast<int>(get_int("gravity.factors"));
  p.learning_rate = get_double("gravity.alpha");
  p.regularization = get_double("gravity.lambda");
  p.max_epochs = static_cast<int>(get_int("gravity.max_epochs"));
  p.patience = static_cast<int>(get_int("gravity.patience"));
  if (has_value("gravity.wall_clock"))
    p.wall_clock_seconds = get_double("gravity.wall_clock");
  p.validation_fraction = get_double("gravity.validation_fraction");
  p.seed = get_u64("gravity.seed");
  p.clamp = get_double("gravity.clamp");
  p.init_range = get_double("gravity.init_range");
  p.bias = get_bool("gravity.bias");
  p.validate();
  return p;
}

KnnOptions RunConfig::knn() const {
  KnnOptions o;
  o.k = static_cast<int>(get_int("knn.k"));
  o.measure = parse_measure(get("knn.measure"));
  o.workers = static_cast<int>(get_int("workers"));
  if (o.k < 1)
    throw UsageError("knn.k must be at least 1");
  return o;
}

void RunConfig::validate() const {
  scale();
  format();
  gravity();
  knn();
  static const std::vector<std::string> models = {"knn",    "gravity", "default",
                                                  "random", "emulated-knn", "hybrid"};
  if (std::find(models.begin(), models.end(), get("model")) == models.end())
    throw UsageError("model: expected one of knn, gravity, default, random, emulated-knn, "
                     "hybrid; got '" + get("model") + "'");
  const double f = get_double("split.test_fraction");
  if (!(f > 0.0 && f < 1.0))
    throw UsageError("split.test_fraction must lie in (0,1)");
  for (const auto &t : get_list("eval.tasks"))
    if (t != "decide" && t != "compare" && t != "discover" && t != "explore")
      throw UsageError("eval.tasks: unknown task '" + t + "'");
  if (get_int("eval.n") < 1)
    throw UsageError("eval.n must be at least 1");
  const double w = get_double("hybrid.w");
  if (!(w >= 0.0 && w <= 1.0))
    throw UsageError("hybrid.w must lie in [0,1]");
  get_bool("eval.segments");
  get_int("workers");
}

} // namespace reco
