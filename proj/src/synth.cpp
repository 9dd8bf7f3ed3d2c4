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
#include "reco/synth.hpp"

#include <algorithm>
#include <numeric>

#include "reco/random.hpp"

namespace reco {

Surrogate make_surrogate(const SurrogateOptions &o) {
  if (o.users < 1 || o.items < 2 || o.min_ratings < 1 || o.latent_dims < 1)
    throw UsageError("surrogate needs at least one user, two items and one latent dimension");
  Rng rng(o.seed);
  const auto D = static_cast<std::size_t>(o.latent_dims);
  const double factor_sd = std::pow(o.interaction_sd * o.interaction_sd / o.latent_dims, 0.25);

  // Items: popularity weight, bias, taste vector.
  const auto ni = static_cast<std::size_t>(o.items);
  std::vector<double> log_weight(ni), item_bias(ni), q(ni * D);
  const double rho = std::clamp(o.popularity_bias_correlation, -1.0, 1.0);
  for (std::size_t i = 0; i < ni; ++i) {
    const double z = rng.normal();
    log_weight[i] = o.popularity_log_sd * z;
    item_bias[i] = o.item_bias_sd * (rho * z + std::sqrt(1.0 - rho * rho) * rng.normal());
    for (std::size_t d = 0; d < D; ++d)
      q[i * D + d] = factor_sd * rng.normal();
  }

  Surrogate s;
  const Timestamp epoch = 956703932; // late April 2000
  std::vector<std::pair<double, Index>> keys(ni);
  std::vector<double> p(D);
  for (Index u = 0; u < o.users; ++u) {
    const double user_bias = o.user_bias_sd * rng.normal();
    for (double &x : p)
      x = factor_sd * rng.normal();
    const double extra = std::exp(o.extra_ratings_log_mean + o.extra_ratings_log_sd * rng.normal());
    const Index cap = std::min(o.max_ratings, o.items);
    const Index count = std::min<Index>(cap, o.min_ratings + static_cast<Index>(std::floor(extra)));

    // Weighted sampling without replacement: keep the largest log(U) / w.
    for (std::size_t i = 0; i < ni; ++i) {
      double r = rng.uniform();
      while (r <= 0.0)
        r = rng.uniform();
      keys[i] = {std::log(r) / std::exp(log_weight[i]), static_cast<Index>(i)};
    }
    std::partial_sort(keys.begin(), keys.begin() + count, keys.end(),
                      [](const auto &a, const auto &b) {
                        return a.first != b.first ? a.first > b.first : a.second < b.second;
                      });
    std::vector<Index> chosen(static_cast<std::size_t>(count));
    for (Index k = 0; k < count; ++k)
      chosen[static_cast<std::size_t>(k)] = keys[static_cast<std::size_t>(k)].second;
    std::sort(chosen.begin(), chosen.end());

    Timestamp date = epoch + static_cast<Timestamp>(rng.below(3u * 365u * 86400u));
    for (Index i : chosen) {
      double dot = 0.0;
      for (std::size_t d = 0; d < D; ++d)
        dot += p[d] * q[static_cast<std::size_t>(i) * D + d];
      const double latent = o.global_mean + user_bias + item_bias[static_cast<std::size_t>(i)] +
                            dot + o.noise_sd * rng.normal();
      const double rating = std::clamp(std::round(latent), 1.0, 5.0);
      date += 1 + static_cast<Timestamp>(rng.below(86400));
      s.logs.push_back({std::to_string(u + 1), std::to_string(i + 1), rating, date});
    }
  }

  // Two genres per item: the two taste dimensions with the largest loading,
  // signed. Years are drawn independently of everything else.
  std::vector<std::size_t> dims(D);
  for (std::size_t i = 0; i < ni; ++i) {
    const std::string item = std::to_string(i + 1);
    std::iota(dims.begin(), dims.end(), std::size_t{0});
    const double *qi = &q[i * D];
    const std::size_t take = std::min<std::size_t>(2, D);
    std::partial_sort(dims.begin(), dims.begin() + static_cast<std::ptrdiff_t>(take), dims.end(),
                      [&](std::size_t a, std::size_t b) {
                        return std::abs(qi[a]) != std::abs(qi[b]) ? std::abs(qi[a]) > std::abs(qi[b])
                                                                  : a < b;
                      });
    for (std::size_t k = 0; k < take; ++k) {
      const std::size_t d = dims[k];
      s.catalog.push_back(
          {item, "genre", "g" + std::to_string(d) + (qi[d] > 0 ? "+" : "-"), 1.0});
    }
    const int year = 1919 + static_cast<int>(rng.below(82));
    s.catalog.push_back({item, "year", std::to_string(year), 1.0});
    s.catalog.push_back({item, "decade", std::to_string(year / 10 * 10) + "s", 1.0});
  }
  return s;
}

} // namespace reco
