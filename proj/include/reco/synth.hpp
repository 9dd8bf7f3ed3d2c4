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

#include <cmath>
#include <cstdint>
#include <vector>

#include "reco/catalog.hpp"
#include "reco/ratings.hpp"

namespace reco {

/// Shape of a seeded synthetic rating log set. The defaults follow the public
/// statistics of MovieLens-1M: user and item counts, at least 20 ratings per
/// user, heavy-tailed activity and popularity, a 1..5 star histogram centred
/// near 3.6. global_mean is the intercept before popularity-weighted sampling,
/// which lifts the realized mean by about 0.12.
struct SurrogateOptions {
  Index users = 6040;
  Index items = 3706;
  Index min_ratings = 20;
  Index max_ratings = 2314;
  double extra_ratings_log_mean = std::log(76.0);
  double extra_ratings_log_sd = 1.14;
  double popularity_log_sd = 1.3;
  /// Correlation between item log-popularity and item bias.
  double popularity_bias_correlation = 0.3;
  double global_mean = 3.46;
  double user_bias_sd = 0.45;
  double item_bias_sd = 0.55;
  int latent_dims = 8;
  double interaction_sd = 0.45;
  double noise_sd = 0.75;
  std::uint64_t seed = 1;
};

struct Surrogate {
  std::vector<RatingLog> logs;
  /// genre descriptors follow the latent taste dimensions; year and decade
  /// descriptors carry no signal.
  std::vector<DescriptorRecord> catalog;
};

Surrogate make_surrogate(const SurrogateOptions &options = {});

} // namespace reco
