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

#include <array>
#include <cstddef>
#include <vector>

#include "reco/core.hpp"
#include "reco/ratings.hpp"

namespace reco {

/// Heavy/light users x popular/unpopular items, thresholded at the exact
/// average number of train ratings per active user and per active item.
/// A count strictly below the average is light (unpopular).
class SegmentGrid {
public:
  SegmentGrid() = default;

  double user_threshold() const { return user_threshold_; }
  double item_threshold() const { return item_threshold_; }

  /// Indices outside the train id space count as zero ratings.
  bool heavy_user(Index u) const;
  bool popular_item(Index i) const;
  Segment segment_of(Index u, Index i) const {
    return make_segment(heavy_user(u), popular_item(i));
  }

  Index heavy_users() const { return heavy_users_; }
  Index light_users() const { return light_users_; }
  Index popular_items() const { return popular_items_; }
  Index unpopular_items() const { return unpopular_items_; }
  /// Train ratings falling in each segment, indexed by Segment.
  const std::array<std::size_t, 4> &rating_counts() const { return rating_counts_; }

  friend SegmentGrid compute_segments(const RatingsMatrix &train);

private:
  std::vector<Index> user_counts_;
  std::vector<Index> item_counts_;
  double user_threshold_ = 0.0;
  double item_threshold_ = 0.0;
  Index heavy_users_ = 0, light_users_ = 0;
  Index popular_items_ = 0, unpopular_items_ = 0;
  std::array<std::size_t, 4> rating_counts_{};
};

/// Throws DataError on an empty train set.
SegmentGrid compute_segments(const RatingsMatrix &train);

} // namespace reco
