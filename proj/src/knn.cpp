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
#include "reco/knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "reco/log.hpp"
#include "reco/random.hpp"

namespace reco {

// ---------------------------------------------------------------------------
// UserProfile

UserProfile::UserProfile(std::vector<Index> items, std::vector<double> ratings,
                         std::vector<Timestamp> dates) {
  if (ratings.size() != items.size())
    throw UsageError("profile items and ratings differ in length");
  if (dates.empty())
    dates.assign(items.size(), kNoDate);
  if (dates.size() != items.size())
    throw UsageError("profile items and dates differ in length");
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return items[a] < items[b]; });
  for (std::size_t k : order) {
    if (!items_.empty() && items_.back() == items[k])
      throw DataError("duplicate item in user profile");
    items_.push_back(items[k]);
    ratings_.push_back(ratings[k]);
    dates_.push_back(dates[k]);
  }
}

UserProfile UserProfile::from_matrix(const RatingsMatrix &m, Index u) {
  const SparseView row = m.user_row(u);
  const auto d = m.user_dates(u);
  return UserProfile({row.index.begin(), row.index.end()}, {row.value.begin(), row.value.end()},
                     {d.begin(), d.end()});
}

bool UserProfile::contains(Index item) const {
  return std::binary_search(items_.begin(), items_.end(), item);
}

std::optional<double> UserProfile::mean() const {
  if (items_.empty())
    return std::nullopt;
  double s = 0;
  for (double r : ratings_)
    s += r;
  return s / static_cast<double>(ratings_.size());
}

void UserProfile::set(Index item, double rating, Timestamp date) {
  auto it = std::lower_bound(items_.begin(), items_.end(), item);
  const auto k = static_cast<std::size_t>(it - items_.begin());
  if (it != items_.end() && *it == item) {
    ratings_[k] = rating;
    dates_[k] = date;
    return;
  }
  items_.insert(it, item);
  ratings_.insert(ratings_.begin() + static_cast<std::ptrdiff_t>(k), rating);
  dates_.insert(dates_.begin() + static_cast<std::ptrdiff_t>(k), date);
}

void UserProfile::erase(Index item) {
  auto it = std::lower_bound(items_.begin(), items_.end(), item);
  if (it == items_.end() || *it != item)
    return;
  const auto k = it - items_.begin();
  items_.erase(it);
  ratings_.erase(ratings_.begin() + k);
  dates_.erase(dates_.begin() + k);
}

// ---------------------------------------------------------------------------
// Predictors

namespace {

std::optional<double> mean_of(SparseView profile) {
  if (profile.empty())
    return std::nullopt;
  double s = 0;
  for (double r : profile.value)
    s += r;
  return s / static_cast<double>(profile.size());
}

std::optional<double> train_item_mean(const RatingsMatrix &train, Index i) {
  if (i < 0 || i >= train.n_items())
    return std::nullopt;
  return train.item_mean(i);
}

struct Accumulated {
  double num = 0.0;
  double den = 0.0;
  std::optional<Explanation> best;
};

// Sums over the neighbours of i that the user rated, in stored order.
// `term(j, r)` gives the numerator contribution per unit weight, or nothing
// when the neighbour must be skipped.
template <typename Lookup, typename Term>
Accumulated accumulate(const SimilarityMatrix &sm, Index i, Lookup &&rating_of, Term &&term) {
  Accumulated acc;
  for (const Neighbor &nb : sm.neighbors(i)) {
    const std::optional<double> r = rating_of(nb.item);
    if (!r)
      continue;
    const std::optional<double> t = term(nb.item, *r);
    if (!t)
      continue;
    acc.num += nb.weight * *t;
    acc.den += std::abs(nb.weight);
    if (!acc.best || nb.weight > acc.best->similarity)
      acc.best = Explanation{nb.item, nb.weight};
  }
  return acc;
}

Prediction finish(const Accumulated &acc, double value, Scale scale) {
  Prediction p;
  p.value = scale.clamp(value);
  p.origin = Origin::MainModel;
  p.explanation = acc.best;
  if (acc.best)
    p.confidence = std::clamp(acc.best->similarity, 0.0, 1.0);
  return p;
}

template <typename Lookup>
Prediction mean_based_core(SparseView profile, Lookup &&rating_of, Index i,
                           const SimilarityMatrix &sm, const RatingsMatrix &train) {
  const std::optional<double> mi = train_item_mean(train, i);
  if (!mi)
    return default_predict(profile, i, train, DefaultMode::Collaborative);
  const Accumulated acc =
      accumulate(sm, i, rating_of, [&](Index j, double r) -> std::optional<double> {
        const auto mj = train_item_mean(train, j);
        if (!mj)
          return std::nullopt;
        return r - *mj;
      });
  if (acc.den == 0.0)
    return default_predict(profile, i, train, DefaultMode::Collaborative);
  return finish(acc, *mi + acc.num / acc.den, train.scale());
}

Prediction mono_default(SparseView profile, Scale scale) {
  Prediction p;
  p.value = scale.clamp(mean_of(profile).value_or(scale.midpoint()));
  p.origin = Origin::DefaultPredictor;
  return p;
}

template <typename Lookup>
Prediction mono_user_core(SparseView profile, Lookup &&rating_of, Index i,
                          const SimilarityMatrix &sm, Scale scale) {
  const Accumulated acc = accumulate(
      sm, i, rating_of, [](Index, double r) -> std::optional<double> { return r; });
  if (acc.den == 0.0)
    return mono_default(profile, scale);
  return finish(acc, acc.num / acc.den, scale);
}

} // namespace

Prediction default_predict(SparseView profile, Index i, const RatingsMatrix &train,
                           DefaultMode mode) {
  const Scale scale = train.scale();
  if (mode == DefaultMode::MonoUser)
    return mono_default(profile, scale);
  const std::optional<double> mu = mean_of(profile);
  std::optional<double> robust, plain;
  if (i >= 0 && i < train.n_items()) {
    robust = train.robust_item_mean(i, kRobustSupport);
    plain = train.item_mean(i);
  }
  double v;
  if (mu && robust)
    v = (*mu + *robust) / 2.0;
  else if (mu)
    v = *mu;
  else if (plain)
    v = *plain;
  else
    v = train.global_mean();
  Prediction p;
  p.value = scale.clamp(v);
  p.origin = Origin::DefaultPredictor;
  return p;
}

Prediction predict_mean_based(SparseView profile, Index i, const SimilarityMatrix &sm,
                              const RatingsMatrix &train) {
  return mean_based_core(
      profile, [&](Index j) { return profile.find(j); }, i, sm, train);
}

Prediction predict_mono_user(SparseView profile, Index i, const SimilarityMatrix &sm,
                             Scale scale) {
  return mono_user_core(
      profile, [&](Index j) { return profile.find(j); }, i, sm, scale);
}

// ---------------------------------------------------------------------------
// Preferences

PreferenceProfile::PreferenceProfile(double max) : max_(max) {
  if (!(max > 0.0))
    throw UsageError("preference scale maximum must be positive");
}

void PreferenceProfile::set(Index descriptor, double p) {
  if (p < min() || p > max())
    throw UsageError("preference outside [" + std::to_string(min()) + ", " +
                     std::to_string(max()) + "]");
  prefs_[descriptor] = p;
}

std::optional<double> PreferenceProfile::get(Index descriptor) const {
  auto it = prefs_.find(descriptor);
  if (it == prefs_.end())
    return std::nullopt;
  return it->second;
}

std::optional<double> predict_from_preferences(const PreferenceProfile &prefs,
                                               Index catalog_item,
                                               const DescriptorCatalog &catalog,
                                               const AttributeDictionary &dict) {
  double num = 0.0, den = 0.0;
  bool overlap = false;
  for (const auto &tag : catalog.descriptors_of(catalog_item)) {
    const auto p = prefs.get(tag.descriptor);
    if (!p)
      continue;
    overlap = true;
    const double w =
        tag.weight * dict.weight(catalog.attributes().name(catalog.attribute_of(tag.descriptor)));
    num += *p * w;
    den += w;
  }
  if (!overlap || den == 0.0)
    return std::nullopt;
  return num / den;
}

// ---------------------------------------------------------------------------
// Ranking

std::vector<ScoredItem> rank_list(std::span<const Index> items, const ItemScorer &score,
                                  const RankOptions &options) {
  const bool dedup = options.duplicates && options.profile && options.duplicate_ceiling;
  std::vector<ScoredItem> out;
  out.reserve(items.size());
  for (Index i : items) {
    if (options.exclude && options.exclude(i))
      continue;
    if (dedup) {
      bool too_close = false;
      for (const Neighbor &nb : options.duplicates->neighbors(i))
        if (nb.weight >= *options.duplicate_ceiling && options.profile->contains(nb.item)) {
          too_close = true;
          break;
        }
      if (too_close)
        continue;
    }
    out.push_back({i, score(i)});
  }
  std::sort(out.begin(), out.end(), scored_before);
  return out;
}

std::function<bool(Index)> preference_veto(const PreferenceProfile &prefs,
                                           const DescriptorCatalog &catalog,
                                           const AttributeDictionary &dict,
                                           const IdMap &item_space, double threshold) {
  return [&prefs, &catalog, &dict, &item_space, threshold](Index i) {
    const auto ci = catalog.items().find(item_space.name(i));
    if (!ci)
      return false;
    const auto p = predict_from_preferences(prefs, *ci, catalog, dict);
    return p && *p < threshold;
  };
}

std::vector<Neighbor> similar_items(Index i, int n, const SimilarityMatrix &sm) {
  if (i < 0 || i >= sm.n_items()) {
    warn("similar_items: item index " + std::to_string(i) + " is not in the matrix");
    return {};
  }
  const auto nbs = sm.neighbors(i);
  const auto take = std::min(nbs.size(), static_cast<std::size_t>(std::max(n, 0)));
  return {nbs.begin(), nbs.begin() + static_cast<std::ptrdiff_t>(take)};
}

// ---------------------------------------------------------------------------
// Top-N

void TopNRequest::validate() const {
  if (n < 1 || max_seeds < 1 || candidates_per_seed < 1 || diversity < 1)
    throw UsageError("Top-N parameters N, G, C and D must all be at least 1");
  if (!(head_fraction > 0.0 && head_fraction < 1.0))
    throw UsageError("short-head fraction must lie in (0,1)");
}

TailSplit::TailSplit(const RatingsMatrix &train, double head_fraction) {
  std::vector<Index> active;
  for (Index i = 0; i < train.n_items(); ++i)
    if (train.item_count(i) > 0)
      active.push_back(i);
  std::sort(active.begin(), active.end(), [&](Index a, Index b) {
    const Index ca = train.item_count(a), cb = train.item_count(b);
    return ca != cb ? ca > cb : a < b;
  });
  const auto head = static_cast<std::size_t>(
      std::llround(head_fraction * static_cast<double>(active.size())));
  head_.assign(static_cast<std::size_t>(train.n_items()), 0);
  for (std::size_t k = 0; k < head && k < active.size(); ++k)
    head_[active[k]] = 1;
}

bool TailSplit::passes(Index i, TailMode mode) const {
  switch (mode) {
  case TailMode::Any:
    return true;
  case TailMode::ShortHead:
    return in_head(i);
  case TailMode::LongTail:
    return !in_head(i);
  }
  return true;
}

std::vector<Index> select_seeds(const UserProfile &profile, const TopNRequest &req) {
  const auto mean = profile.mean();
  if (!mean)
    return {};
  std::vector<std::size_t> pool;
  for (std::size_t k = 0; k < profile.size(); ++k)
    if (profile.ratings()[k] > *mean)
      pool.push_back(k);
  if (pool.empty()) {
    pool.resize(profile.size());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
  }
  const auto g = static_cast<std::size_t>(req.max_seeds);
  Rng rng(req.seed);
  if (req.recency == SeedRecency::RecentFirst) {
    std::sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
      const Timestamp da = profile.dates()[a], db = profile.dates()[b];
      return da != db ? da > db : profile.items()[a] < profile.items()[b];
    });
    pool.resize(std::min(pool.size(), 2 * g));
  }
  rng.shuffle(std::span(pool));
  pool.resize(std::min(pool.size(), g));
  std::vector<Index> seeds;
  for (std::size_t k : pool)
    seeds.push_back(profile.items()[k]);
  return seeds;
}

std::vector<ScoredItem> recommend_top_n(const UserProfile &profile, const TopNRequest &req,
                                        const SimilarityMatrix &sm,
                                        const RatingsMatrix &train, const TailSplit &tails,
                                        const ItemScorer &score) {
  req.validate();
  if (profile.empty()) {
    // New user: robust-mean popularity list.
    return full_catalog_top_n(
        profile, req.n,
        [&](Index i) {
          return default_predict(profile.view(), i, train, DefaultMode::Collaborative).value;
        },
        train.n_items());
  }
  std::vector<Index> candidates;
  for (Index s : select_seeds(profile, req)) {
    int taken = 0;
    for (const Neighbor &nb : sm.neighbors(s)) {
      if (taken == req.candidates_per_seed)
        break;
      if (!tails.passes(nb.item, req.tail))
        continue;
      candidates.push_back(nb.item);
      ++taken;
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::erase_if(candidates, [&](Index i) { return profile.contains(i); });

  std::vector<ScoredItem> ranked = rank_list(candidates, score);
  const auto n = static_cast<std::size_t>(req.n);
  const std::size_t window = std::min(ranked.size(), n * static_cast<std::size_t>(req.diversity));
  if (req.diversity == 1 || window <= n) {
    ranked.resize(std::min(ranked.size(), n));
    return ranked;
  }
  std::vector<std::size_t> pos(window);
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  Rng rng(req.seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t k = 0; k < n; ++k)
    std::swap(pos[k], pos[k + rng.below(window - k)]);
  pos.resize(n);
  std::sort(pos.begin(), pos.end());
  std::vector<ScoredItem> out;
  for (std::size_t p : pos)
    out.push_back(ranked[p]);
  return out;
}

std::vector<ScoredItem> full_catalog_top_n(SparseView profile, int n,
                                           std::span<const double> scores) {
  std::vector<ScoredItem> cand;
  cand.reserve(scores.size());
  std::size_t p = 0;
  for (Index i = 0; i < static_cast<Index>(scores.size()); ++i) {
    while (p < profile.size() && profile.index[p] < i)
      ++p;
    if (p < profile.size() && profile.index[p] == i)
      continue;
    cand.push_back({i, scores[i]});
  }
  const auto keep = std::min(cand.size(), static_cast<std::size_t>(std::max(n, 0)));
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(keep), cand.end(),
                    scored_before);
  cand.resize(keep);
  return cand;
}

std::vector<ScoredItem> full_catalog_top_n(const UserProfile &profile, int n,
                                           const ItemScorer &score, Index n_items) {
  std::vector<double> scores(static_cast<std::size_t>(n_items));
  for (Index i = 0; i < n_items; ++i)
    scores[i] = profile.contains(i) ? 0.0 : score(i);
  return full_catalog_top_n(profile.view(), n, scores);
}

// ---------------------------------------------------------------------------
// Scorers

void Scorer::score_all(Index u, std::span<double> out) const {
  for (Index i = 0; i < static_cast<Index>(out.size()); ++i)
    out[i] = predict(u, i).value;
}

namespace {

SparseView row_or_empty(const RatingsMatrix &m, Index u) {
  if (u < 0 || u >= m.n_users())
    return {};
  return m.user_row(u);
}

} // namespace

Prediction DefaultScorer::predict(Index u, Index i) const {
  return default_predict(row_or_empty(train_, u), i, train_, mode_);
}

Prediction RandomScorer::predict(Index u, Index i) const {
  Prediction p;
  p.value = scale_.lo + scale_.width() * hash_uniform(seed_, static_cast<std::uint64_t>(u),
                                                      static_cast<std::uint64_t>(i));
  p.origin = Origin::MainModel;
  return p;
}

KnnScorer::KnnScorer(const RatingsMatrix &train, const SimilarityMatrix &sm, ScoringMode mode,
                     std::string name)
    : train_(train), sm_(sm), mode_(mode), name_(std::move(name)) {
  if (sm.n_items() != train.n_items())
    throw UsageError("similarity matrix and train set have different item spaces");
}

Prediction KnnScorer::predict(Index u, Index i) const {
  const SparseView profile = row_or_empty(train_, u);
  auto lookup = [&](Index j) { return profile.find(j); };
  if (mode_ == ScoringMode::MeanBased)
    return mean_based_core(profile, lookup, i, sm_, train_);
  return mono_user_core(profile, lookup, i, sm_, train_.scale());
}

void KnnScorer::score_all(Index u, std::span<double> out) const {
  const SparseView profile = row_or_empty(train_, u);
  std::vector<double> dense(static_cast<std::size_t>(train_.n_items()),
                            std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < profile.size(); ++k)
    dense[profile.index[k]] = profile.value[k];
  auto lookup = [&](Index j) -> std::optional<double> {
    const double r = dense[j];
    if (std::isnan(r))
      return std::nullopt;
    return r;
  };
  for (Index i = 0; i < static_cast<Index>(out.size()); ++i)
    out[i] = mode_ == ScoringMode::MeanBased
                 ? mean_based_core(profile, lookup, i, sm_, train_).value
                 : mono_user_core(profile, lookup, i, sm_, train_.scale()).value;
}

} // namespace reco
