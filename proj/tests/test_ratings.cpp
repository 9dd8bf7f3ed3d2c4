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

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "oracle.hpp"
#include "reco/ratings.hpp"
#include "reco/segments.hpp"

namespace reco {
namespace {

RatingsMatrix parse(const std::string &text, Scale scale = {1, 5}) {
  std::istringstream in(text);
  const auto logs = parse_logs(in);
  return build_matrix(logs, scale);
}

std::string error_of(const std::string &text) {
  try {
    std::istringstream in(text);
    const auto logs = parse_logs(in, LogFormat::Tsv, "f.tsv");
    build_matrix(logs, {1, 5});
  } catch (const DataError &e) {
    return e.what();
  }
  return "";
}

TEST(IdMap, NumericIdsSortNumerically) {
  const auto m = IdMap::from_ids({"10", "2", "1", "2"});
  ASSERT_EQ(m.size(), 3);
  EXPECT_EQ(m.name(0), "1");
  EXPECT_EQ(m.name(1), "2");
  EXPECT_EQ(m.name(2), "10");
  EXPECT_EQ(m.at("10"), 2);
  EXPECT_FALSE(m.find("3"));
  EXPECT_THROW(m.at("3"), DataError);
}

TEST(IdMap, MixedIdsSortLexically) {
  const auto m = IdMap::from_ids({"b", "10", "a"});
  EXPECT_EQ(m.name(0), "10");
  EXPECT_EQ(m.name(2), "b");
}

TEST(Parse, ReadsTsvAndMovieLens) {
  std::istringstream tsv("# comment\nu1\ti1\t4\t2001-02-03\n\nu2\ti1\t3.5\n");
  const auto a = parse_logs(tsv);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].date, *parse_iso8601("2001-02-03"));
  EXPECT_EQ(a[1].date, kNoDate);
  EXPECT_DOUBLE_EQ(a[1].rating, 3.5);

  std::istringstream ml("1::1193::5::978300760\r\n");
  const auto b = parse_logs(ml, LogFormat::MovieLens);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].item, "1193");
  EXPECT_EQ(b[0].date, 978300760);
}

TEST(Parse, ErrorsCarryLineNumbers) {
  EXPECT_NE(error_of("u\ti\t4\nu\ti\n").find("f.tsv:2"), std::string::npos);
  EXPECT_NE(error_of("u\ti\tx\n").find("f.tsv:1"), std::string::npos);
  EXPECT_NE(error_of("u\ti\t4\tnot-a-date\n").find("date"), std::string::npos);
  EXPECT_NE(error_of("u\t\t4\n").find("empty"), std::string::npos);
}

TEST(Parse, RejectsRatingsOffScale) {
  const std::string msg = error_of("u\ti\t6\n");
  EXPECT_NE(msg.find("outside the scale"), std::string::npos);
  EXPECT_NE(msg.find("(u, i)"), std::string::npos);
  EXPECT_THROW(parse("u\ti\t0.5\n"), DataError);
  EXPECT_NO_THROW(parse("u\ti\t0.5\n", {0.5, 5}));
}

TEST(Parse, LatestDuplicateWins) {
  const auto m = parse("u\ti\t2\t2001-01-02\nu\ti\t5\t2001-01-01\nv\ti\t1\nv\ti\t4\n");
  EXPECT_EQ(m.size(), 2u);
  EXPECT_DOUBLE_EQ(*m.rating(m.users().at("u"), 0), 2.0);
  EXPECT_DOUBLE_EQ(*m.rating(m.users().at("v"), 0), 4.0);
}

TEST(Matrix, AccessorsMatchDenseTable) {
  const auto m = oracle::random_matrix(30, 20, 0.3, 3);
  const auto t = oracle::from_matrix(m);
  std::size_t n = 0;
  double s = 0;
  for (Index u = 0; u < m.n_users(); ++u) {
    Index c = 0;
    for (Index i = 0; i < m.n_items(); ++i) {
      EXPECT_EQ(m.rating(u, i).has_value(), t.has(u, i));
      if (t.has(u, i)) {
        EXPECT_DOUBLE_EQ(*m.rating(u, i), t.at(u, i));
        ++c;
        ++n;
        s += t.at(u, i);
      }
    }
    EXPECT_EQ(m.user_count(u), c);
    if (auto mu = t.user_mean(u)) {
      EXPECT_NEAR(*m.user_mean(u), *mu, 1e-12);
    } else {
      EXPECT_FALSE(m.user_mean(u));
    }
  }
  for (Index i = 0; i < m.n_items(); ++i) {
    EXPECT_EQ(m.item_count(i), static_cast<Index>(t.raters(i).size()));
    if (auto mi = t.item_mean(i)) {
      EXPECT_NEAR(*m.item_mean(i), *mi, 1e-12);
    }
  }
  EXPECT_EQ(m.size(), n);
  EXPECT_NEAR(m.global_mean(), s / static_cast<double>(n), 1e-12);
}

TEST(Matrix, RobustMeanNeedsSupport) {
  std::string text;
  for (int u = 0; u < 9; ++u)
    text += "u" + std::to_string(u) + "\ti\t4\n";
  auto m = parse(text);
  EXPECT_FALSE(m.robust_item_mean(0));
  text += "u9\ti\t2\n";
  m = parse(text);
  ASSERT_TRUE(m.robust_item_mean(0));
  EXPECT_NEAR(*m.robust_item_mean(0), 3.8, 1e-12);
}

TEST(Matrix, FingerprintIgnoresInputOrder) {
  const auto a = parse("u1\ti1\t4\nu2\ti2\t3\nu1\ti2\t1\n");
  const auto b = parse("u1\ti2\t1\nu2\ti2\t3\nu1\ti1\t4\n");
  const auto c = parse("u1\ti2\t1\nu2\ti2\t3\nu1\ti1\t5\n");
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_NE(a.fingerprint(), c.fingerprint());
}

TEST(Matrix, WriteThenParseRoundTrips) {
  const auto m = parse("u1\ti1\t4\t2001-02-03\nu2\ti2\t3.5\nu1\ti2\t1\n");
  std::ostringstream out;
  write_logs(out, m);
  const auto back = parse(out.str());
  EXPECT_EQ(back.fingerprint(), m.fingerprint());
  EXPECT_EQ(back.user_dates(back.users().at("u1"))[0], m.user_dates(0)[0]);
}

TEST(Matrix, TransposeSwapsRoles) {
  const auto m = oracle::random_matrix(12, 9, 0.4, 5);
  const auto t = transpose(m);
  EXPECT_EQ(t.n_users(), m.n_items());
  EXPECT_EQ(t.size(), m.size());
  for (const Entry &e : m.entries())
    EXPECT_EQ(*t.rating(e.item, e.user), e.rating);
}

TEST(Matrix, RestrictUsersKeepsIdSpace) {
  const auto m = oracle::random_matrix(10, 8, 0.5, 9);
  const std::vector<Index> keep{1, 4};
  const auto r = restrict_users(m, keep);
  EXPECT_EQ(r.n_users(), m.n_users());
  EXPECT_EQ(r.size(), static_cast<std::size_t>(m.user_count(1) + m.user_count(4)));
  EXPECT_EQ(r.user_count(0), 0);
}

TEST(Matrix, DescribeCountsActiveCells) {
  const auto m = parse("u1\ti1\t4\nu2\ti1\t2\nu2\ti2\t3\n");
  const auto s = describe(m);
  EXPECT_EQ(s.logs, 3u);
  EXPECT_NEAR(s.sparsity, 0.25, 1e-12);
  EXPECT_NEAR(s.global_mean, 3.0, 1e-12);
  EXPECT_NEAR(s.ratings_per_user, 1.5, 1e-12);
}

std::multiset<std::tuple<Index, Index, double>> cells(const RatingsMatrix &m) {
  std::multiset<std::tuple<Index, Index, double>> s;
  for (const Entry &e : m.entries())
    s.insert({e.user, e.item, e.rating});
  return s;
}

class SplitProperty : public ::testing::TestWithParam<unsigned> {};

TEST_P(SplitProperty, PerUserSplitPartitionsLogs) {
  const auto m = oracle::random_matrix(40, 30, 0.25, GetParam());
  const auto s = split_train_test(m, 0.1, GetParam());
  EXPECT_EQ(s.train.size() + s.test.size(), m.size());
  auto all = cells(s.train);
  for (const auto &c : cells(s.test)) {
    EXPECT_EQ(all.count(c), 0u);
    all.insert(c);
  }
  EXPECT_EQ(all, cells(m));
  for (Index u = 0; u < m.n_users(); ++u) {
    const Index n = m.user_count(u);
    const Index t = s.test.user_count(u);
    Index want = static_cast<Index>(std::lround(0.1 * n));
    if (n >= 2)
      want = std::min(want, n - 1);
    EXPECT_EQ(t, want) << "user " << u;
  }
}

TEST_P(SplitProperty, SplitIsDeterministic) {
  const auto m = oracle::random_matrix(40, 30, 0.25, GetParam());
  const auto a = split_train_test(m, 0.2, 11);
  const auto b = split_train_test(m, 0.2, 11);
  EXPECT_EQ(a.test.fingerprint(), b.test.fingerprint());
  const auto c = split_train_test(m, 0.2, 12);
  EXPECT_NE(a.test.fingerprint(), c.test.fingerprint());
}

TEST_P(SplitProperty, GlobalSplitTakesExactShare) {
  const auto m = oracle::random_matrix(40, 30, 0.25, GetParam());
  const auto s = split_train_test(m, 0.25, 3, SplitMode::Global);
  EXPECT_EQ(s.test.size(), static_cast<std::size_t>(std::lround(0.25 * m.size())));
  EXPECT_EQ(s.train.size() + s.test.size(), m.size());
}

TEST_P(SplitProperty, KFoldTestSetsPartition) {
  const auto m = oracle::random_matrix(25, 20, 0.3, GetParam());
  const auto folds = kfold(m, 5, GetParam());
  ASSERT_EQ(folds.size(), 5u);
  std::multiset<std::tuple<Index, Index, double>> all;
  for (const auto &f : folds) {
    EXPECT_EQ(f.train.size() + f.test.size(), m.size());
    for (const auto &c : cells(f.test))
      all.insert(c);
    for (Index u = 0; u < m.n_users(); ++u) {
      const double share = static_cast<double>(m.user_count(u)) / 5.0;
      EXPECT_LE(std::abs(f.test.user_count(u) - share), 1.0);
    }
  }
  EXPECT_EQ(all, cells(m));
}

INSTANTIATE_TEST_SUITE_P(Seeds, SplitProperty, ::testing::Values(1u, 2u, 3u, 4u));

TEST(Split, RejectsBadFractions) {
  const auto m = oracle::random_matrix(5, 5, 0.5, 1);
  EXPECT_THROW(split_train_test(m, 0.0, 1), UsageError);
  EXPECT_THROW(split_train_test(m, 1.0, 1), UsageError);
  EXPECT_THROW(kfold(m, 1, 1), UsageError);
}

TEST(Segments, ThresholdsAreMeanCounts) {
  // u1 rates 3 items, u2 one, u3 two; items counts 3, 2, 1.
  const auto m = parse("u1\ta\t4\nu1\tb\t3\nu1\tc\t2\nu2\ta\t5\nu3\ta\t1\nu3\tb\t2\n");
  const auto g = compute_segments(m);
  EXPECT_DOUBLE_EQ(g.user_threshold(), 2.0);
  EXPECT_DOUBLE_EQ(g.item_threshold(), 2.0);
  EXPECT_TRUE(g.heavy_user(m.users().at("u1")));
  EXPECT_TRUE(g.heavy_user(m.users().at("u3")));
  EXPECT_FALSE(g.heavy_user(m.users().at("u2")));
  EXPECT_TRUE(g.popular_item(m.items().at("b")));
  EXPECT_FALSE(g.popular_item(m.items().at("c")));
  EXPECT_EQ(g.heavy_users(), 2);
  EXPECT_EQ(g.unpopular_items(), 1);
  const auto &rc = g.rating_counts();
  EXPECT_EQ(rc[static_cast<int>(Segment::HP)], 4u);
  EXPECT_EQ(rc[static_cast<int>(Segment::HU)], 1u);
  EXPECT_EQ(rc[static_cast<int>(Segment::LP)], 1u);
  EXPECT_EQ(rc[static_cast<int>(Segment::LU)], 0u);
}

TEST(Segments, CountsSumToTotals) {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const auto m = oracle::random_matrix(50, 40, 0.2, seed);
    const auto g = compute_segments(m);
    const auto &rc = g.rating_counts();
    EXPECT_EQ(rc[0] + rc[1] + rc[2] + rc[3], m.size());
    EXPECT_EQ(g.heavy_users() + g.light_users(), m.active_users());
    EXPECT_EQ(g.popular_items() + g.unpopular_items(), m.active_items());
  }
}

} // namespace
} // namespace reco
