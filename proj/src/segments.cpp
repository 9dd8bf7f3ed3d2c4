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
#include "reco/segments.hpp"

namespace reco {

bool SegmentGrid::heavy_user(Index u) const {
  const Index c = (u >= 0 && u < static_cast<Index>(user_counts_.size())) ? user_counts_[u] : 0;
  return static_cast<double>(c) >= user_threshold_ && c > 0;
}

bool SegmentGrid::popular_item(Index i) const {
  const Index c = (i >= 0 && i < static_cast<Index>(item_counts_.size())) ? item_counts_[i] : 0;
  return static_cast<double>(c) >= item_threshold_ && c > 0;
}

SegmentGrid compute_segments(const RatingsMatrix &train) {
  if (train.empty())
    throw DataError("segments need a non-empty train set");
  SegmentGrid g;
  g.user_counts_.resize(static_cast<std::size_t>(train.n_users()));
  g.item_counts_.resize(static_cast<std::size_t>(train.n_items()));
  for (Index u = 0; u < train.n_users(); ++u)
    g.user_counts_[u] = train.user_count(u);
  for (Index i = 0; i < train.n_items(); ++i)
    g.item_counts_[i] = train.item_count(i);
  const auto logs = static_cast<double>(train.size());
  g.user_threshold_ = logs / train.active_users();
  g.item_threshold_ = logs / train.active_items();

  for (Index u = 0; u < train.n_users(); ++u) {
    if (g.user_counts_[u] == 0)
      continue;
    (g.heavy_user(u) ? g.heavy_users_ : g.light_users_)++;
  }
  for (Index i = 0; i < train.n_items(); ++i) {
    if (g.item_counts_[i] == 0)
      continue;
    (g.popular_item(i) ? g.popular_items_ : g.unpopular_items_)++;
  }
  for (Index u = 0; u < train.n_users(); ++u) {
    const SparseView row = train.user_row(u);
    for (Index i : row.index)
      g.rating_counts_[static_cast<std::size_t>(g.segment_of(u, i))]++;
  }
  return g;
}

} // namespace reco
