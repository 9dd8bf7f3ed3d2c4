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
#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracle.hpp"
#include "reco/catalog.hpp"
#include "reco/knn.hpp"
#include "reco/similarity.hpp"

namespace reco {
namespace {

using M = SimilarityMeasure;

RatingsMatrix tiny() {
  std::vector<RatingLog> logs{{"u1", "i1", 5}, {"u1", "i2", 3}, {"u2", "i1", 4},
                              {"u2", "i2", 2}, {"u2", "i3", 4}, {"u3", "i2", 1},
                              {"u3", "i3", 5}};
  return build_matrix(logs, {1, 5});
}

TEST(Predict, HandWorkedMeanBasedAndMonoUser) {
  const auto m = tiny();
  const auto sm = knn_search(m, {200, M::WeightedPearson, 1});
  const auto p = UserProfile::from_matrix(m, 2);
  // i1 mean 4.5; neighbours i2 (0.4714, deviation -1) and i3 (1/3, deviation 0.5).
  const double w2 = 2.0 / 3.0 * std::sqrt(0.5), w3 = 1.0 / 3.0;
  const double mean_based = 4.5 + (w2 * -1.0 + w3 * 0.5) / (w2 + w3);
  const double mono = (w2 * 1.0 + w3 * 5.0) / (w2 + w3);
  const auto a = predict_mean_based(p, 0, sm, m);
  const auto b = predict_mono_user(p, 0, sm, m.scale());
  EXPECT_NEAR(a.value, mean_based, 1e-12);
  EXPECT_NEAR(a.value, 4.121, 5e-4);
  EXPECT_NEAR(b.value, mono, 1e-12);
  EXPECT_NEAR(b.value, 2.657, 5e-4);
  EXPECT_EQ(a.origin, Origin::MainModel);
  ASSERT_TRUE(a.explanation);
  EXPECT_EQ(a.explanation->item, 1);
  EXPECT_NEAR(*a.confidence, w2, 1e-12);
}

TEST(Predict, TopOneForFirstUserIsThirdItem) {
  const auto m = tiny();
  const auto sm = knn_search(m, {200, M::WeightedPearson, 1});
  const KnnScorer scorer(m, sm, ScoringMode::MeanBased);
  TopNRequest req;
  req.n = 1;
  const auto p = UserProfile::from_matrix(m, 0);
  const auto top = recommend_top_n(p, req, sm, m, TailSplit(m, 0.2),
                                   [&](Index i) { return scorer.predict(0, i).value; });
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(m.items().name(top[0].item), "i3");
}

class OracleProperty : public ::testing::TestWithParam<unsigned> {};

TEST_P(OracleProperty, PredictorsMatchBruteForce) {
  const unsigned seed = GetParam();
  const auto m = oracle::random_matrix(12, 5, 0.5, seed);
  const auto t = oracle::from_matrix(m);
  for (M measure : {M::Pearson, M::WeightedPearson, M::Jaccard}) {
    const oracle::M om = measure == M::Pearson           ? oracle::M::P
                         : measure == M::WeightedPearson ? oracle::M::WP
                                                         : oracle::M::J;
    const int k = 3;
    const auto sm = knn_search(m, {k, measure, 1});
    const KnnScorer mean_based(m, sm, ScoringMode::MeanBased);
    const KnnScorer mono(m, sm, ScoringMode::MonoUser);
    for (Index u = 0; u < m.n_users(); ++u)
      for (Index i = 0; i < m.n_items(); ++i) {
        if (m.item_count(i) == 0)
          continue;
        const auto nb = oracle::top_k(om, t, i, k);
        const auto a = mean_based.predict(u, i);
        if (auto want = oracle::mean_based(t, u, i, nb)) {
          EXPECT_NEAR(a.value, std::clamp(*want, 1.0, 5.0), 1e-9);
          EXPECT_EQ(a.origin, Origin::MainModel);
        } else {
          EXPECT_EQ(a.origin, Origin::DefaultPredictor);
        }
        const auto b = mono.predict(u, i);
        if (auto want = oracle::mono_user(t, u, nb)) {
          EXPECT_NEAR(b.value, std::clamp(*want, 1.0, 5.0), 1e-9);
        } else {
          EXPECT_EQ(b.origin, Origin::DefaultPredictor);
          EXPECT_NEAR(b.value, t.user_mean(u).value_or(3.0), 1e-12);
        }
      }
  }
}

TEST_P(OracleProperty, ScoreAllEqualsPredict) {
  const auto m = oracle::random_matrix(30, 25, 0.3, GetParam());
  const auto sm = knn_search(m, {6, M::WeightedPearson, 1});
  for (ScoringMode mode : {ScoringMode::MeanBased, ScoringMode::MonoUser}) {
    const KnnScorer s(m, sm, mode);
    std::vector<double> all(static_cast<std::size_t>(m.n_items()));
    for (Index u = 0; u < m.n_users(); ++u) {
      s.score_all(u, all);
      for (Index i = 0; i < m.n_items(); ++i)
        EXPECT_EQ(all[i], s.predict(u, i).value);
    }
  }
}

TEST_P(OracleProperty, PredictionsStayOnScale) {
  const auto m = oracle::random_matrix(30, 25, 0.3, GetParam());
  const auto sm = knn_search(m, {6, M::Pearson, 1});
  const KnnScorer s(m, sm, ScoringMode::MeanBased);
  for (Index u = 0; u < m.n_users(); ++u)
    for (Index i = 0; i < m.n_items(); ++i) {
      const auto p = s.predict(u, i);
      EXPECT_GE(p.value, 1.0);
      EXPECT_LE(p.value, 5.0);
      if (p.confidence) {
        EXPECT_GE(*p.confidence, 0.0);
        EXPECT_LE(*p.confidence, 1.0);
      }
    }
}

TEST_P(OracleProperty, MeanBasedFollowsShiftOfAllRatings) {
  const auto m = oracle::random_matrix(25, 15, 0.35, GetParam());
  std::vector<Entry> shifted = m.entries();
  for (Entry &e : shifted)
    e.rating += 10.0;
  const RatingsMatrix s(m.user_ids(), m.item_ids(), Scale{11, 15}, shifted);
  // K covers every item so that rounding cannot reorder ties at the cut.
  const auto a = knn_search(m, {20, M::WeightedPearson, 1});
  const auto b = knn_search(s, {20, M::WeightedPearson, 1});
  const KnnScorer pa(m, a, ScoringMode::MeanBased), pb(s, b, ScoringMode::MeanBased);
  for (Index u = 0; u < m.n_users(); ++u)
    for (Index i = 0; i < m.n_items(); ++i) {
      const auto x = pa.predict(u, i);
      if (x.origin != Origin::MainModel || x.value <= 1.0 || x.value >= 5.0)
        continue;
      EXPECT_NEAR(pb.predict(u, i).value, x.value + 10.0, 1e-9);
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, OracleProperty, ::testing::Values(1u, 2u, 3u, 4u, 5u));

TEST(Default, CascadeOrder) {
  // Item "p" has 10 raters (robust mean available), item "q" has one.
  std::vector<RatingLog> logs;
  for (int u = 0; u < 10; ++u)
    logs.push_back({"u" + std::to_string(u), "p", u < 5 ? 4.0 : 2.0});
  logs.push_back({"u0", "q", 5.0});
  const auto m = build_matrix(logs, {1, 5});
  const Index p = m.items().at("p"), q = m.items().at("q");
  const Index u0 = m.users().at("u0"), u1 = m.users().at("u1");
  // Profile mean and robust item mean averaged.
  EXPECT_NEAR(default_predict(m.user_row(u0), p, m, DefaultMode::Collaborative).value,
              (4.5 + 3.0) / 2.0, 1e-12);
  // No robust mean: the profile mean alone.
  EXPECT_NEAR(default_predict(m.user_row(u1), q, m, DefaultMode::Collaborative).value, 4.0,
              1e-12);
  // No profile: the item mean.
  EXPECT_NEAR(default_predict({}, q, m, DefaultMode::Collaborative).value, 5.0, 1e-12);
  // Nothing at all: the global mean.
  EXPECT_NEAR(default_predict({}, 99, m, DefaultMode::Collaborative).value,
              m.global_mean(), 1e-12);
  EXPECT_NEAR(default_predict({}, p, m, DefaultMode::MonoUser).value, 3.0, 1e-12);
  EXPECT_EQ(default_predict({}, p, m, DefaultMode::MonoUser).origin,
            Origin::DefaultPredictor);
}

TEST(Profile, SetEraseKeepOrder) {
  UserProfile p({5, 1, 3}, {2.0, 4.0, 3.0});
  EXPECT_EQ(p.items()[0], 1);
  EXPECT_DOUBLE_EQ(*p.mean(), 3.0);
  p.set(2, 5.0);
  p.set(5, 1.0);
  EXPECT_EQ(p.size(), 4u);
  EXPECT_DOUBLE_EQ(*p.rating(5), 1.0);
  p.erase(1);
  p.erase(42);
  EXPECT_FALSE(p.contains(1));
  EXPECT_TRUE(p.contains(2));
  EXPECT_THROW(UserProfile({1, 1}, {2.0, 3.0}), DataError);
  EXPECT_THROW(UserProfile({1}, {2.0, 3.0}), UsageError);
}

DescriptorCatalog small_catalog() {
  std::vector<DescriptorRecord> r{{"a", "genre", "drama", 1.0}, {"a", "actor", "x", 0.5},
                                  {"b", "genre", "comedy", 1.0}, {"c", "year", "1999", 1.0}};
  return DescriptorCatalog::from_records(r);
}

TEST(Preferences, WeightedAverageOverKnownDescriptors) {
  const auto c = small_catalog();
  AttributeDictionary dict;
  dict.set("actor", 2.0);
  PreferenceProfile prefs(2.0);
  prefs.set(*c.descriptor("genre", "drama"), 2.0);
  prefs.set(*c.descriptor("actor", "x"), -1.0);
  // Weights: drama 1 x 1, actor 0.5 x 2.
  EXPECT_NEAR(*predict_from_preferences(prefs, c.items().at("a"), c, dict), 0.5, 1e-12);
  EXPECT_FALSE(predict_from_preferences(prefs, c.items().at("b"), c, dict));
  EXPECT_THROW(prefs.set(0, 2.5), UsageError);
  EXPECT_THROW(prefs.set(0, -201.0), UsageError);
  EXPECT_NO_THROW(prefs.set(0, -200.0));
}

TEST(Preferences, VetoDropsDislikedItems) {
  const auto c = small_catalog();
  AttributeDictionary dict;
  PreferenceProfile prefs(2.0);
  prefs.set(*c.descriptor("genre", "comedy"), -100.0);
  const auto space = IdMap::from_ids({"a", "b", "c", "d"});
  const auto veto = preference_veto(prefs, c, dict, space, 0.0);
  EXPECT_TRUE(veto(space.at("b")));
  EXPECT_FALSE(veto(space.at("a")));
  EXPECT_FALSE(veto(space.at("d")));
  const std::vector<Index> items{0, 1, 2, 3};
  RankOptions opt;
  opt.exclude = veto;
  const auto ranked = rank_list(items, [](Index i) { return -i; }, opt);
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].item, 0);
}

TEST(Ranking, SortsAndSuppressesNearDuplicates) {
  const auto items = std::make_shared<IdMap>(IdMap::from_ids({"a", "b", "c", "d"}));
  std::vector<std::vector<Neighbor>> lists(4);
  lists[2] = {{0, 0.99}};
  const SimilarityMatrix dup(items, 5, "manual", lists);
  const UserProfile profile({0}, {5.0});
  RankOptions opt;
  opt.duplicates = &dup;
  opt.profile = &profile;
  opt.duplicate_ceiling = 0.95;
  const std::vector<Index> cand{1, 2, 3};
  const auto r = rank_list(cand, [](Index i) { return i == 3 ? 2.0 : 4.0; }, opt);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].item, 1);
  EXPECT_EQ(r[1].item, 3);
}

TEST(Similar, ReturnsHeadOfListAndWarnsOnUnknown) {
  const auto m = tiny();
  const auto sm = knn_search(m, {200, M::WeightedPearson, 1});
  const auto s = similar_items(0, 1, sm);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].item, 1);
  EXPECT_TRUE(similar_items(17, 3, sm).empty());
}

class TopNProperty : public ::testing::TestWithParam<unsigned> {};

TEST_P(TopNProperty, ListsRespectRequest) {
  const unsigned seed = GetParam();
  const auto m = oracle::random_matrix(60, 80, 0.15, seed);
  const auto sm = knn_search(m, {30, M::WeightedPearson, 1});
  const KnnScorer scorer(m, sm, ScoringMode::MeanBased);
  const TailSplit tails(m, 0.2);
  for (TailMode tail : {TailMode::Any, TailMode::ShortHead, TailMode::LongTail})
    for (int diversity : {1, 3}) {
      TopNRequest req;
      req.n = 5;
      req.max_seeds = 4;
      req.candidates_per_seed = 10;
      req.diversity = diversity;
      req.tail = tail;
      req.seed = seed;
      for (Index u = 0; u < m.n_users(); ++u) {
        const auto p = UserProfile::from_matrix(m, u);
        auto score = [&](Index i) { return scorer.predict(u, i).value; };
        const auto top = recommend_top_n(p, req, sm, m, tails, score);
        EXPECT_LE(top.size(), 5u);
        std::set<Index> seen;
        for (std::size_t k = 0; k < top.size(); ++k) {
          EXPECT_FALSE(p.contains(top[k].item));
          EXPECT_TRUE(tails.passes(top[k].item, tail));
          EXPECT_TRUE(seen.insert(top[k].item).second);
          if (k > 0) {
            EXPECT_GE(top[k - 1].score, top[k].score);
          }
        }
        EXPECT_EQ(top.size(), recommend_top_n(p, req, sm, m, tails, score).size());
      }
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, TopNProperty, ::testing::Values(1u, 2u, 3u));

TEST(TopN, SeedsAreAboveMeanAndBounded) {
  UserProfile p({0, 1, 2, 3, 4, 5}, {5, 5, 4, 1, 1, 2}, {1, 2, 3, 4, 5, 6});
  TopNRequest req;
  req.max_seeds = 2;
  const auto seeds = select_seeds(p, req);
  ASSERT_EQ(seeds.size(), 2u);
  for (Index s : seeds)
    EXPECT_GT(*p.rating(s), *p.mean());
  req.max_seeds = 1;
  req.recency = SeedRecency::RecentFirst;
  for (std::uint64_t s = 0; s < 20; ++s) {
    req.seed = s;
    const auto r = select_seeds(p, req);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_NE(r[0], 0); // oldest liked item is outside the 2G most recent
  }
  UserProfile flat({0, 1}, {3, 3});
  EXPECT_EQ(select_seeds(flat, TopNRequest{}).size(), 2u);
}

TEST(TopN, DiversityDrawsFromWindow) {
  const auto m = oracle::random_matrix(80, 120, 0.2, 11);
  const auto sm = knn_search(m, {60, M::WeightedPearson, 1});
  const KnnScorer scorer(m, sm, ScoringMode::MeanBased);
  const TailSplit tails(m, 0.2);
  const auto p = UserProfile::from_matrix(m, 0);
  auto score = [&](Index i) { return scorer.predict(0, i).value; };
  TopNRequest req;
  req.n = 4;
  req.candidates_per_seed = 60;
  const auto plain = recommend_top_n(p, req, sm, m, tails, score);
  req.n = 12;
  const auto window = recommend_top_n(p, req, sm, m, tails, score);
  req.n = 4;
  req.diversity = 3;
  std::set<Index> pool;
  for (const auto &s : window)
    pool.insert(s.item);
  bool differs = false;
  for (std::uint64_t s = 0; s < 10; ++s) {
    req.seed = s;
    const auto d = recommend_top_n(p, req, sm, m, tails, score);
    ASSERT_EQ(d.size(), 4u);
    for (std::size_t k = 0; k < d.size(); ++k)
      EXPECT_TRUE(pool.count(d[k].item));
    for (std::size_t k = 0; k < d.size(); ++k)
      differs |= d[k].item != plain[k].item;
  }
  EXPECT_TRUE(differs);
}

TEST(TopN, NewUserGetsPopularityList) {
  const auto m = oracle::random_matrix(40, 30, 0.3, 2);
  const auto sm = knn_search(m, {10, M::WeightedPearson, 1});
  TopNRequest req;
  req.n = 3;
  const auto top = recommend_top_n(UserProfile{}, req, sm, m, TailSplit(m, 0.2),
                                   [](Index) { return 0.0; });
  ASSERT_EQ(top.size(), 3u);
  EXPECT_GE(top[0].score, top[2].score);
  TopNRequest bad;
  bad.head_fraction = 1.0;
  EXPECT_THROW(bad.validate(), UsageError);
}

TEST(TopN, TailSplitTakesMostRatedItems) {
  std::vector<RatingLog> logs{{"u1", "a", 3}, {"u2", "a", 3}, {"u3", "a", 3},
                              {"u1", "b", 3}, {"u2", "b", 3}, {"u1", "c", 3},
                              {"u1", "d", 3}, {"u2", "e", 3}};
  const auto m = build_matrix(logs, {1, 5});
  const TailSplit t(m, 0.4);
  EXPECT_TRUE(t.in_head(m.items().at("a")));
  EXPECT_TRUE(t.in_head(m.items().at("b")));
  EXPECT_FALSE(t.in_head(m.items().at("c")));
  EXPECT_TRUE(t.passes(m.items().at("c"), TailMode::LongTail));
}

TEST(Scorers, RandomIsUniformOnScaleAndStable) {
  const RandomScorer r(Scale{1, 5}, 3);
  double s = 0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const double v = r.predict(k % 97, k / 97).value;
    EXPECT_GE(v, 1.0);
    EXPECT_LT(v, 5.0);
    s += v;
  }
  EXPECT_NEAR(s / n, 3.0, 0.05);
  EXPECT_EQ(r.predict(4, 5).value, RandomScorer(Scale{1, 5}, 3).predict(4, 5).value);
}

TEST(Scorers, KnnRejectsForeignItemSpace) {
  const auto m = tiny();
  const auto other = oracle::random_matrix(5, 7, 0.5, 1);
  const auto sm = knn_search(other, {3, M::Jaccard, 1});
  EXPECT_THROW(KnnScorer(m, sm, ScoringMode::MeanBased), UsageError);
}

} // namespace
} // namespace reco
