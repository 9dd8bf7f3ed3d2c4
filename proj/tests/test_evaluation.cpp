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
#include <sstream>

#include "oracle.hpp"
#include "reco/catalog.hpp"
#include "reco/evaluation.hpp"
#include "reco/segments.hpp"
#include "reco/synth.hpp"

namespace reco {
namespace {

TEST(Metrics, RmseAndMae) {
  const std::vector<double> p{4, 3}, t{5, 3};
  EXPECT_NEAR(rmse(p, t), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(mae(p, t), 0.5, 1e-15);
  EXPECT_THROW(rmse({}, {}), UsageError);
  EXPECT_THROW(mae(p, std::vector<double>{1}), UsageError);
}

TEST(Metrics, InOutSplitsByOrigin) {
  const std::vector<ScoredLog> logs{{0, 0, 5, 4, Origin::MainModel},
                                    {0, 1, 3, 1, Origin::DefaultPredictor}};
  const auto r = rmse_in_out(logs);
  EXPECT_NEAR(*r.rmse_in, 1.0, 1e-15);
  EXPECT_NEAR(r.rmse_out, std::sqrt(2.5), 1e-15);
  EXPECT_NEAR(r.coverage, 0.5, 1e-15);
  EXPECT_THROW(rmse_in_out({}), UsageError);
}

TEST(Ndpm, HandWorkedCounts) {
  const std::vector<ScoredLog> logs{{0, 0, 5, 2}, {0, 1, 3, 2}, {0, 2, 1, 4}};
  const auto r = ndpm(logs);
  EXPECT_EQ(r.c_l, 3u);
  EXPECT_EQ(r.c_minus, 2u);
  EXPECT_EQ(r.c_u, 1u);
  EXPECT_NEAR(*r.ndpm, 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(*r.percent_compatible, 0.0, 1e-15);
}

TEST(Ndpm, Limits) {
  std::vector<ScoredLog> same, reversed, tied;
  for (int k = 0; k < 5; ++k) {
    same.push_back({0, k, 1.0 + k, 0.1 * k});
    reversed.push_back({0, k, 1.0 + k, -0.1 * k});
    tied.push_back({0, k, 1.0 + k, 3.0});
  }
  EXPECT_EQ(*ndpm(same).ndpm, 0.0);
  EXPECT_EQ(*ndpm(same).percent_compatible, 1.0);
  EXPECT_EQ(*ndpm(reversed).ndpm, 1.0);
  EXPECT_EQ(*ndpm(tied).ndpm, 0.5);
  // Equal truths give no pair at all.
  const std::vector<ScoredLog> flat{{0, 0, 3, 1}, {0, 1, 3, 5}};
  EXPECT_FALSE(ndpm(flat).ndpm);
}

TEST(Ndpm, PairsStayWithinUsers) {
  const std::vector<ScoredLog> logs{{0, 0, 5, 1}, {1, 1, 1, 5}};
  EXPECT_EQ(ndpm(logs).c_l, 0u);
}

class NdpmProperty : public ::testing::TestWithParam<unsigned> {};

TEST_P(NdpmProperty, MatchesBruteForceCount) {
  std::mt19937 gen(GetParam());
  std::uniform_int_distribution<int> user(0, 3), star(1, 5), guess(1, 4);
  std::vector<ScoredLog> logs;
  std::vector<oracle::Triple> triples;
  const int n = 1 + static_cast<int>(gen() % 20);
  for (int k = 0; k < n; ++k) {
    const int u = user(gen);
    const double t = star(gen), p = guess(gen) * 0.5;
    logs.push_back({u, k, t, p});
    triples.push_back({u, t, p});
  }
  const auto r = ndpm(logs);
  const auto want = oracle::pairs(triples);
  EXPECT_EQ(r.c_l, want.l);
  EXPECT_EQ(r.c_minus, want.minus);
  EXPECT_EQ(r.c_u, want.u);
  if (want.l > 0) {
    const double l = static_cast<double>(want.l);
    EXPECT_NEAR(*r.ndpm, (2.0 * want.minus + want.u) / (2.0 * l), 1e-15);
    EXPECT_GE(*r.ndpm, 0.0);
    EXPECT_LE(*r.ndpm, 1.0);
    EXPECT_NEAR(*r.percent_compatible, (l - want.minus - want.u) / l, 1e-15);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, NdpmProperty, ::testing::Range(1u, 31u));

// Train: u rates a 5, b 2 (mean 3.5). Test: c 4, d 4, e 2.
std::pair<RatingsMatrix, RatingsMatrix> discovery_fixture() {
  std::vector<std::string> items{"a", "b", "c", "d", "e"};
  auto U = std::make_shared<IdMap>(IdMap::from_ids({"u"}));
  auto I = std::make_shared<IdMap>(IdMap::from_ids(items));
  std::vector<RatingLog> train{{"u", "a", 5}, {"u", "b", 2}};
  std::vector<RatingLog> test{{"u", "c", 4}, {"u", "d", 4}, {"u", "e", 2}};
  return {build_matrix(train, {1, 5}, U, I), build_matrix(test, {1, 5}, U, I)};
}

TEST(Discovery, PrecisionOfHandWorkedList) {
  const auto [train, test] = discovery_fixture();
  const auto &I = train.items();
  const std::vector<Recommendation> recs{
      {0, I.at("c")}, {0, I.at("d")}, {0, I.at("e")}, {0, I.at("a")}};
  const auto r = precision_recall_f(recs, train, test, 4);
  EXPECT_EQ(r.evaluable, 3u);
  EXPECT_EQ(r.relevant, 2u);
  EXPECT_NEAR(*r.precision, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(*r.recall, 0.5, 1e-15);
  EXPECT_NEAR(*r.f, 2.0 * (2.0 / 3.0) * 0.5 / (2.0 / 3.0 + 0.5), 1e-15);
  EXPECT_FALSE(precision_recall_f({}, train, test).precision);
}

TEST(Discovery, ImpactMagnitudeAndSign) {
  std::vector<RatingLog> train, test;
  for (int k = 0; k < 50; ++k)
    train.push_back({"v" + std::to_string(k), "pop", 3});
  train.push_back({"u", "x", 3});
  test.push_back({"u", "pop", 4});
  test.push_back({"u", "rare", 1});
  std::vector<std::string> users{"u"}, items{"pop", "rare", "x"};
  for (int k = 0; k < 50; ++k)
    users.push_back("v" + std::to_string(k));
  auto U = std::make_shared<IdMap>(IdMap::from_ids(users));
  auto I = std::make_shared<IdMap>(IdMap::from_ids(items));
  const auto tr = build_matrix(train, {1, 5}, U, I), te = build_matrix(test, {1, 5}, U, I);
  const Index u = U->at("u");
  const std::vector<Recommendation> recs{{u, I->at("pop")}, {u, I->at("rare")}};
  const auto r = impact(recs, tr, te, 1000);
  ASSERT_EQ(r.mi.size(), 2u);
  EXPECT_NEAR(r.mi[0], 20.0, 1e-12);
  EXPECT_NEAR(r.mi[1], -1000.0, 1e-12);
  EXPECT_NEAR(*r.ami, -490.0, 1e-12);
}

TEST(Discovery, AmiFlipsWithLikedStatus) {
  const auto m = oracle::random_matrix(40, 30, 0.3, 3);
  const auto s = split_train_test(m, 0.3, 1);
  std::vector<Recommendation> recs;
  for (const Entry &e : s.test.entries())
    recs.push_back({e.user, e.item});
  // Reflect every test rating around the user's train mean.
  std::vector<Entry> flipped;
  for (Entry e : s.test.entries()) {
    const auto mu = s.train.user_mean(e.user);
    if (!mu || e.rating == *mu)
      continue;
    e.rating = 2 * *mu - e.rating;
    flipped.push_back(e);
  }
  std::vector<Entry> kept;
  for (const Entry &e : s.test.entries())
    for (const Entry &f : flipped)
      if (e.user == f.user && e.item == f.item)
        kept.push_back(e);
  const RatingsMatrix a(m.user_ids(), m.item_ids(), Scale{-10, 20}, kept);
  const RatingsMatrix b(m.user_ids(), m.item_ids(), Scale{-10, 20}, flipped);
  const auto ia = impact(recs, s.train, a, m.n_items());
  const auto ib = impact(recs, s.train, b, m.n_items());
  ASSERT_TRUE(ia.ami);
  EXPECT_NEAR(*ia.ami, -*ib.ami, 1e-9);
}

struct Run {
  RatingsMatrix train, test;
  SegmentGrid grid;
};

Run make_run(unsigned seed) {
  SurrogateOptions o;
  o.users = 150;
  o.items = 120;
  o.min_ratings = 5;
  o.max_ratings = 60;
  o.extra_ratings_log_mean = 2.5;
  o.seed = seed;
  const auto s = make_surrogate(o);
  const auto m = build_matrix(s.logs, {1, 5});
  auto split = split_train_test(m, 0.2, seed);
  auto grid = compute_segments(split.train);
  return {std::move(split.train), std::move(split.test), grid};
}

class ReportProperty : public ::testing::TestWithParam<unsigned> {};

TEST_P(ReportProperty, SegmentsAddUpToTotals) {
  const auto r = make_run(GetParam());
  const DefaultScorer model(r.train);
  const auto rep = evaluate_scoring(model, r.train, r.test, r.grid);
  double n = 0, sse = 0, pairs = 0;
  for (Segment s : kAllSegments) {
    n += rep.get("n", to_string(s)).value_or(0);
    sse += rep.get("sse-out", to_string(s)).value_or(0);
    pairs += rep.get("pairs", to_string(s)).value_or(0);
  }
  pairs += *rep.get("pairs", "HX") + *rep.get("pairs", "LX");
  EXPECT_EQ(n, static_cast<double>(r.test.size()));
  EXPECT_NEAR(sse, *rep.get("sse-out"), 1e-9);
  EXPECT_EQ(pairs, *rep.get("pairs"));

  // Independent recomputation of the headline numbers.
  std::vector<double> p, t;
  std::vector<oracle::Triple> triples;
  for (const Entry &e : r.test.entries()) {
    p.push_back(model.predict(e.user, e.item).value);
    t.push_back(e.rating);
    triples.push_back({e.user, e.rating, p.back()});
  }
  double se = 0;
  for (std::size_t k = 0; k < p.size(); ++k)
    se += (p[k] - t[k]) * (p[k] - t[k]);
  EXPECT_NEAR(*rep.get("rmse-out"), std::sqrt(se / static_cast<double>(p.size())), 1e-12);
  const auto c = oracle::pairs(triples);
  EXPECT_EQ(*rep.get("pairs"), static_cast<double>(c.l));
  EXPECT_NEAR(*rep.get("percent-compatible"),
              static_cast<double>(c.l - c.minus - c.u) / static_cast<double>(c.l), 1e-12);
}

TEST_P(ReportProperty, DiscoveryIsNovelAndEvaluableSubsetOfTest) {
  const auto r = make_run(GetParam());
  const DefaultScorer model(r.train);
  const auto recs = recommend_all(model, r.train, r.test, 10, 1);
  std::set<std::pair<Index, Index>> seen;
  std::size_t hits = 0;
  for (const auto &x : recs) {
    EXPECT_FALSE(r.train.rating(x.user, x.item));
    EXPECT_GT(r.test.user_count(x.user), 0);
    EXPECT_TRUE(seen.insert({x.user, x.item}).second);
    hits += r.test.rating(x.user, x.item).has_value();
  }
  const auto rep = evaluate_discovery(model, r.train, r.test, r.grid, {1, 10, true});
  EXPECT_EQ(*rep.get("recommended"), static_cast<double>(recs.size()));
  EXPECT_EQ(*rep.get("evaluable"), static_cast<double>(hits));
  double h = 0;
  for (Segment s : kAllSegments)
    h += *rep.get("evaluable", to_string(s));
  EXPECT_EQ(h, *rep.get("evaluable"));
  const auto pr = precision_recall_f(recs, r.train, r.test);
  EXPECT_NEAR(*rep.get("precision"), *pr.precision, 1e-12);
  const auto im = impact(recs, r.train, r.test, r.train.n_items());
  EXPECT_NEAR(*rep.get("ami"), *im.ami, 1e-9);
}

TEST_P(ReportProperty, WorkerCountDoesNotChangeReport) {
  const auto r = make_run(GetParam());
  const DefaultScorer model(r.train);
  auto a = evaluate_scoring(model, r.train, r.test, r.grid, {1, 10, true});
  auto b = evaluate_scoring(model, r.train, r.test, r.grid, {4, 10, true});
  std::ostringstream sa, sb;
  write_records_csv(sa, std::span(&a, 1));
  write_records_csv(sb, std::span(&b, 1));
  EXPECT_EQ(sa.str(), sb.str());
}

INSTANTIATE_TEST_SUITE_P(Seeds, ReportProperty, ::testing::Values(1u, 2u, 3u));

TEST(Report, CsvRoundTrip) {
  EvaluationReport a;
  a.model = "knn";
  a.fold = 2;
  a.set("decide", "rmse-out", "all", 0.8712345678901234);
  a.set("compare", "ndpm", "HX", 0.25);
  std::ostringstream out;
  out << "# config=abc\n";
  write_records_csv(out, std::span(&a, 1));
  std::istringstream in(out.str());
  const auto back = read_records_csv(in);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].model, "knn");
  EXPECT_EQ(back[0].fold, 2);
  EXPECT_EQ(*back[0].get("rmse-out"), 0.8712345678901234);
  EXPECT_EQ(*back[0].get("ndpm", "HX"), 0.25);
  std::istringstream bad("schema,model,fold,task,metric,segment,value\n1,m,0,decide,rmse\n");
  EXPECT_THROW(read_records_csv(bad), DataError);
}

TEST(Report, WinnersAverageFoldsAndRespectDirection) {
  auto make = [](std::string model, int fold, double rmse, double prec) {
    EvaluationReport r;
    r.model = std::move(model);
    r.fold = fold;
    r.set("decide", "rmse-out", "HP", rmse);
    r.set("discover", "precision", "HP", prec);
    return r;
  };
  const std::vector<EvaluationReport> reps{make("a", 0, 0.90, 0.7), make("a", 1, 0.80, 0.7),
                                           make("b", 0, 0.84, 0.9), make("b", 1, 0.87, 0.5)};
  const auto grid = winners_grid(reps);
  ASSERT_EQ(grid.size(), 16u);
  for (const auto &c : grid) {
    if (c.segment != Segment::HP) {
      EXPECT_TRUE(c.model.empty());
      continue;
    }
    if (c.metric == "rmse-out") {
      EXPECT_EQ(c.model, "a");
      EXPECT_NEAR(c.value, 0.85, 1e-12);
    } else if (c.metric == "precision") {
      EXPECT_EQ(c.model, "a");
      EXPECT_NEAR(c.value, 0.7, 1e-12);
    }
  }
  std::ostringstream out;
  write_winners_grid(out, grid);
  EXPECT_NE(out.str().find("\ta (0.85"), std::string::npos);
}

TEST(ColdStart, CountsAreLogSpaced) {
  EXPECT_EQ(log_spaced_counts(6040),
            (std::vector<Index>{10, 30, 100, 300, 1000, 3000, 6040}));
  EXPECT_EQ(log_spaced_counts(25), (std::vector<Index>{10, 25}));
  EXPECT_EQ(log_spaced_counts(300), (std::vector<Index>{10, 30, 100, 300}));
}

TEST(ColdStart, SmallExperimentRuns) {
  SurrogateOptions o;
  o.users = 120;
  o.items = 80;
  o.min_ratings = 5;
  o.max_ratings = 40;
  o.extra_ratings_log_mean = 2.0;
  const auto s = make_surrogate(o);
  const auto m = build_matrix(s.logs, {1, 5});
  const auto catalog = DescriptorCatalog::from_records(s.catalog);
  const std::vector<Index> counts{10, 60};
  const std::vector<ColdStartMode> modes{ColdStartMode::Collaborative, ColdStartMode::Thematic,
                                         ColdStartMode::HybridLight};
  for (ProfileRegime regime : {ProfileRegime::Long, ProfileRegime::Short}) {
    const auto curve = cold_start_experiment(m, catalog, counts, regime, modes, {50});
    EXPECT_EQ(curve.points.size(), 6u);
    for (const auto &p : curve.points) {
      EXPECT_GT(p.rmse_out, 0.0);
      EXPECT_LT(p.rmse_out, 4.0);
    }
    EXPECT_TRUE(curve.rmse_out(10, ColdStartMode::Thematic, regime));
  }
  const std::vector<Index> bad{30, 10};
  EXPECT_THROW(cold_start_experiment(m, catalog, bad, ProfileRegime::Long, modes), UsageError);
}

} // namespace
} // namespace reco
