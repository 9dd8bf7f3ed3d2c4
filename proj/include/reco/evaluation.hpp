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
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reco/catalog.hpp"
#include "reco/knn.hpp"
#include "reco/ratings.hpp"
#include "reco/segments.hpp"

namespace reco {

/// Throws UsageError on empty or mismatched inputs.
double rmse(std::span<const double> predictions, std::span<const double> truths);
double mae(std::span<const double> predictions, std::span<const double> truths);

/// One scored test log.
struct ScoredLog {
  Index user = 0;
  Index item = 0;
  double truth = 0.0;
  double prediction = 0.0;
  Origin origin = Origin::MainModel;
};

struct InOut {
  std::optional<double> rmse_in; // MainModel predictions only
  double rmse_out = 0.0;         // all predictions
  double coverage = 0.0;         // MainModel fraction
  std::size_t n_in = 0;
  std::size_t n = 0;
};

/// Throws UsageError on an empty list.
InOut rmse_in_out(std::span<const ScoredLog> logs);

struct NdpmResult {
  std::optional<double> ndpm;
  std::optional<double> percent_compatible;
  std::size_t c_l = 0;     // strict preference pairs in the truth
  std::size_t c_minus = 0; // pairs the system reverses
  std::size_t c_u = 0;     // pairs the system ties
};

/// Pairs are formed within each user only. Ties are exact equality.
NdpmResult ndpm(std::span<const ScoredLog> logs);
NdpmResult ndpm_from_counts(std::size_t c_l, std::size_t c_minus, std::size_t c_u);

struct Recommendation {
  Index user;
  Index item;
};

struct PrecisionResult {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f;
  std::size_t relevant = 0;
  std::size_t evaluable = 0; // |H|
};

/// H = recommendations present in test; relevant when the test rating is at
/// least the user's train mean. Recall and F need `relevant_universe`, the
/// number of relevant test items over all users.
PrecisionResult precision_recall_f(std::span<const Recommendation> recs,
                                   const RatingsMatrix &train, const RatingsMatrix &test,
                                   std::optional<std::size_t> relevant_universe = std::nullopt);

struct ImpactResult {
  std::vector<double> mi; // one per evaluable recommendation, in input order
  double smi = 0.0;
  std::optional<double> ami;
};

/// MI = catalog_size / max(train count, 1), signed by r - mean(u) with
/// sign(0) = +1. AMI = SMI / |H|.
ImpactResult impact(std::span<const Recommendation> recs, const RatingsMatrix &train,
                    const RatingsMatrix &test, Index catalog_size);

/// Metric records of one model run, in insertion order.
class EvaluationReport {
public:
  struct Record {
    std::string task;
    std::string metric;
    std::string segment; // "all", HP, HU, LP, LU, or HX/LX for user-only pair buckets
    double value;
  };

  std::string model;
  int fold = 0;
  std::map<std::string, std::string> meta; // run metadata, written to the text report only

  void set(std::string task, std::string metric, std::string segment, double value);
  std::optional<double> get(std::string_view metric, std::string_view segment = "all") const;
  const std::vector<Record> &records() const { return records_; }
  void append(const EvaluationReport &other);

private:
  std::vector<Record> records_;
};

inline constexpr int kReportSchema = 1;

/// Header line stating how ranking pairs are attributed to segments.
inline constexpr std::string_view kPairAttributionNote =
    "ranking pairs count in a user x item segment only when both items share an item "
    "segment; other pairs go to HX (heavy user) or LX (light user)";

struct EvalOptions {
  int workers = 0;
  int top_n = 10;
  bool segments = true;
};

/// Decide and compare tasks: RMSE-in/out, MAE, coverage and counts per
/// segment (fixed by train counts), NDPM and percent compatible.
EvaluationReport evaluate_scoring(const Scorer &model, const RatingsMatrix &train,
                                  const RatingsMatrix &test, const SegmentGrid &grid,
                                  const EvalOptions &options = {});

/// Predictions for every test log, in (user, item) order.
std::vector<ScoredLog> score_test(const Scorer &model, const RatingsMatrix &test, int workers);

/// Discover and explore tasks: full-catalog Top-N per test user, precision
/// and AMI per segment.
EvaluationReport evaluate_discovery(const Scorer &model, const RatingsMatrix &train,
                                    const RatingsMatrix &test, const SegmentGrid &grid,
                                    const EvalOptions &options = {});

/// Full-catalog Top-N lists for each user with at least one test log.
std::vector<Recommendation> recommend_all(const Scorer &model, const RatingsMatrix &train,
                                          const RatingsMatrix &test, int n, int workers);

void write_report_text(std::ostream &out, const EvaluationReport &r);
/// CSV with header schema,model,fold,task,metric,segment,value.
void write_records_csv(std::ostream &out, std::span<const EvaluationReport> reports);
std::vector<EvaluationReport> read_records_csv(std::istream &in,
                                               std::string_view source = "<stream>");

/// Best model per task x segment. Values are averaged over folds first.
struct WinnerCell {
  std::string task;
  std::string metric;
  Segment segment;
  std::string model; // empty when no model reported the cell
  double value = 0.0;
};

std::vector<WinnerCell> winners_grid(std::span<const EvaluationReport> reports);
void write_winners_grid(std::ostream &out, std::span<const WinnerCell> grid);

enum class ColdStartMode { Collaborative, Thematic, HybridLight };
enum class ProfileRegime { Long, Short };

std::string_view to_string(ColdStartMode m);
std::string_view to_string(ProfileRegime r);

struct ColdStartPoint {
  Index users = 0;
  ColdStartMode mode = ColdStartMode::Collaborative;
  ProfileRegime regime = ProfileRegime::Long;
  std::optional<double> rmse_in;
  double rmse_out = 0.0;
};

struct ColdStartCurve {
  std::vector<ColdStartPoint> points;
  std::optional<double> rmse_out(Index users, ColdStartMode mode, ProfileRegime regime) const;
};

struct ColdStartOptions {
  int k = 200;
  SimilarityMeasure collaborative_measure = SimilarityMeasure::WeightedPearson;
  std::uint64_t seed = 0;
  int workers = 0;
};

/// For each user count (strictly increasing), samples that many users, splits
/// their logs per regime (long: 90% train, short: 10% train) and measures each
/// mode. Thematic and hybrid-light use catalog Jaccard similarity.
ColdStartCurve cold_start_experiment(const RatingsMatrix &logs, const DescriptorCatalog &catalog,
                                     std::span<const Index> user_counts, ProfileRegime regime,
                                     std::span<const ColdStartMode> modes,
                                     const ColdStartOptions &options = {});

/// Roughly log-spaced counts 10, 30, 100, 300, ... capped at max_users (included).
std::vector<Index> log_spaced_counts(Index max_users, Index start = 10);

} // namespace reco
