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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reco/catalog.hpp"
#include "reco/ratings.hpp"
#include "reco/similarity.hpp"

namespace reco {

/// A user's rated items, kept sorted by item. Owned and mutated by the
/// caller; predictors read it on every call, so edits apply immediately.
class UserProfile {
public:
  UserProfile() = default;
  /// Throws DataError on duplicate items.
  UserProfile(std::vector<Index> items, std::vector<double> ratings,
              std::vector<Timestamp> dates = {});

  static UserProfile from_matrix(const RatingsMatrix &m, Index u);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  SparseView view() const { return {items_, ratings_}; }
  std::span<const Index> items() const { return items_; }
  std::span<const double> ratings() const { return ratings_; }
  std::span<const Timestamp> dates() const { return dates_; }
  bool contains(Index item) const;
  std::optional<double> rating(Index item) const { return view().find(item); }
  std::optional<double> mean() const;

  /// Inserts or replaces a rating.
  void set(Index item, double rating, Timestamp date = kNoDate);
  void erase(Index item);

private:
  std::vector<Index> items_;
  std::vector<double> ratings_;
  std::vector<Timestamp> dates_;
};

/// Profile item that weighed most in a prediction.
struct Explanation {
  Index item;
  double similarity;
};

struct Prediction {
  double value = 0.0;
  Origin origin = Origin::DefaultPredictor;
  std::optional<double> confidence;
  std::optional<Explanation> explanation;
};

enum class ScoringMode { MeanBased, MonoUser };
enum class DefaultMode { Collaborative, MonoUser };

/// Minimum number of ratings for an item mean to be trusted.
inline constexpr Index kRobustSupport = 10;

/// Fallback cascade. Collaborative: (user mean + robust item mean) / 2, else
/// user mean, else item mean, else global mean. Mono-user: user mean, else the
/// scale midpoint. The user mean comes from the profile.
Prediction default_predict(SparseView profile, Index i, const RatingsMatrix &train,
                           DefaultMode mode);

/// Item mean plus similarity-weighted deviations of the user's ratings on the
/// neighbours of i from their own item means. Falls back to the collaborative
/// default when no neighbour of i is in the profile.
Prediction predict_mean_based(SparseView profile, Index i, const SimilarityMatrix &sm,
                              const RatingsMatrix &train);
inline Prediction predict_mean_based(const UserProfile &p, Index i,
                                     const SimilarityMatrix &sm,
                                     const RatingsMatrix &train) {
  return predict_mean_based(p.view(), i, sm, train);
}

/// Similarity-weighted average of the user's own ratings; needs no statistics
/// about other users. Falls back to the user mean, then the scale midpoint.
Prediction predict_mono_user(SparseView profile, Index i, const SimilarityMatrix &sm,
                             Scale scale);
inline Prediction predict_mono_user(const UserProfile &p, Index i,
                                    const SimilarityMatrix &sm, Scale scale) {
  return predict_mono_user(p.view(), i, sm, scale);
}

/// Descriptor preferences on the asymmetric scale [-100 * max, max].
class PreferenceProfile {
public:
  explicit PreferenceProfile(double max = 2.0);

  double max() const { return max_; }
  double min() const { return -100.0 * max_; }
  /// Throws UsageError when p lies outside [min, max].
  void set(Index descriptor, double p);
  std::optional<double> get(Index descriptor) const;
  const std::map<Index, double> &values() const { return prefs_; }

private:
  double max_;
  std::map<Index, double> prefs_;
};

/// Weighted mean of the user's preferences over the descriptors of a catalog
/// item. Empty when no descriptor of the item carries a preference or all
/// weights are zero.
std::optional<double> predict_from_preferences(const PreferenceProfile &prefs,
                                               Index catalog_item,
                                               const DescriptorCatalog &catalog,
                                               const AttributeDictionary &dict);

struct ScoredItem {
  Index item;
  double score;
};

inline bool scored_before(const ScoredItem &a, const ScoredItem &b) {
  return a.score != b.score ? a.score > b.score : a.item < b.item;
}

using ItemScorer = std::function<double(Index)>;

struct RankOptions {
  /// Items for which this returns true are dropped before sorting (e.g. a
  /// preference veto).
  std::function<bool(Index)> exclude;
  /// Near-duplicate suppression: drop items whose similarity to any profile
  /// item reaches the ceiling. Off unless all three are set.
  const SimilarityMatrix *duplicates = nullptr;
  const UserProfile *profile = nullptr;
  std::optional<double> duplicate_ceiling;
};

/// Sorts by descending score, ties by ascending item.
std::vector<ScoredItem> rank_list(std::span<const Index> items, const ItemScorer &score,
                                  const RankOptions &options = {});

/// Veto filter: excludes items whose preference prediction is below threshold.
std::function<bool(Index)> preference_veto(const PreferenceProfile &prefs,
                                           const DescriptorCatalog &catalog,
                                           const AttributeDictionary &dict,
                                           const IdMap &item_space, double threshold);

/// First min(n, K) neighbours of i; unknown items give an empty list and a
/// warning.
std::vector<Neighbor> similar_items(Index i, int n, const SimilarityMatrix &sm);

enum class TailMode { Any, ShortHead, LongTail };
enum class SeedRecency { Any, RecentFirst };

struct TopNRequest {
  int n = 10;
  int max_seeds = 10;           // G
  int candidates_per_seed = 100; // C
  int diversity = 1;            // D
  TailMode tail = TailMode::Any;
  double head_fraction = 0.2;
  SeedRecency recency = SeedRecency::Any;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Short head = the head_fraction most rated items of the train set.
class TailSplit {
public:
  TailSplit() = default;
  TailSplit(const RatingsMatrix &train, double head_fraction);
  bool in_head(Index i) const {
    return i >= 0 && i < static_cast<Index>(head_.size()) && head_[i];
  }
  bool passes(Index i, TailMode mode) const;

private:
  std::vector<char> head_;
};

/// Up to G seeds: profile items rated above the user's mean (all rated items
/// when none qualify), shuffled by the request seed, optionally the most
/// recent first.
std::vector<Index> select_seeds(const UserProfile &profile, const TopNRequest &req);

/// Seed-based personalised Top-N: seeds, up to C filtered neighbours per
/// seed, removal of known items, ranking by `score`, then N items drawn from
/// the first N * D. An empty profile falls back to the robust-mean popularity
/// list of the train set.
std::vector<ScoredItem> recommend_top_n(const UserProfile &profile, const TopNRequest &req,
                                        const SimilarityMatrix &sm,
                                        const RatingsMatrix &train, const TailSplit &tails,
                                        const ItemScorer &score);

/// Scores every catalog item the user does not know and keeps the best n.
std::vector<ScoredItem> full_catalog_top_n(SparseView profile, int n,
                                           std::span<const double> scores);
std::vector<ScoredItem> full_catalog_top_n(const UserProfile &profile, int n,
                                           const ItemScorer &score, Index n_items);

/// Anything that predicts a rating for a (user, item) pair of a train id space.
class Scorer {
public:
  virtual ~Scorer() = default;
  virtual std::string name() const = 0;
  virtual Prediction predict(Index u, Index i) const = 0;
  /// Fills out[i] with predict(u, i).value for every item.
  virtual void score_all(Index u, std::span<double> out) const;
};

/// Default predictor cascade on a train set.
class DefaultScorer : public Scorer {
public:
  DefaultScorer(const RatingsMatrix &train, DefaultMode mode = DefaultMode::Collaborative)
      : train_(train), mode_(mode) {}
  std::string name() const override { return "default"; }
  Prediction predict(Index u, Index i) const override;

private:
  const RatingsMatrix &train_;
  DefaultMode mode_;
};

/// Uniform random ratings on the scale, a pure function of (seed, u, i).
class RandomScorer : public Scorer {
public:
  RandomScorer(Scale scale, std::uint64_t seed) : scale_(scale), seed_(seed) {}
  std::string name() const override { return "random"; }
  Prediction predict(Index u, Index i) const override;

private:
  Scale scale_;
  std::uint64_t seed_;
};

/// Item-item KNN scoring on a train set's user profiles.
class KnnScorer : public Scorer {
public:
  KnnScorer(const RatingsMatrix &train, const SimilarityMatrix &sm, ScoringMode mode,
            std::string name = "knn");
  std::string name() const override { return name_; }
  Prediction predict(Index u, Index i) const override;
  void score_all(Index u, std::span<double> out) const override;

private:
  const RatingsMatrix &train_;
  const SimilarityMatrix &sm_;
  ScoringMode mode_;
  std::string name_;
};

} // namespace reco
