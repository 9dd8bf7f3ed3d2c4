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
#include "reco/evaluation.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include "reco/log.hpp"
#include "reco/random.hpp"
#include "text.hpp"

namespace reco {

// ---------------------------------------------------------------------------
// Point metrics

namespace {

void check_lengths(std::span<const double> p, std::span<const double> t) {
  if (p.empty())
    throw UsageError("metric over an empty prediction list");
  if (p.size() != t.size())
    throw UsageError("predictions and truths differ in length");
}

} // namespace

double rmse(std::span<const double> predictions, std::span<const double> truths) {
  check_lengths(predictions, truths);
  CompensatedSum se;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    const double d = predictions[k] - truths[k];
    se.add(d * d);
  }
  return std::sqrt(se.value() / static_cast<double>(predictions.size()));
}

double mae(std::span<const double> predictions, std::span<const double> truths) {
  check_lengths(predictions, truths);
  CompensatedSum ae;
  for (std::size_t k = 0; k < predictions.size(); ++k)
    ae.add(std::abs(predictions[k] - truths[k]));
  return ae.value() / static_cast<double>(predictions.size());
}

InOut rmse_in_out(std::span<const ScoredLog> logs) {
  if (logs.empty())
    throw UsageError("metric over an empty prediction list");
  CompensatedSum all, in;
  InOut r;
  for (const ScoredLog &l : logs) {
    const double d = l.prediction - l.truth;
    all.add(d * d);
    if (l.origin == Origin::MainModel) {
      in.add(d * d);
      ++r.n_in;
    }
  }
  r.n = logs.size();
  r.rmse_out = std::sqrt(all.value() / static_cast<double>(r.n));
  if (r.n_in > 0)
    r.rmse_in = std::sqrt(in.value() / static_cast<double>(r.n_in));
  r.coverage = static_cast<double>(r.n_in) / static_cast<double>(r.n);
  return r;
}

NdpmResult ndpm_from_counts(std::size_t c_l, std::size_t c_minus, std::size_t c_u) {
  NdpmResult r{std::nullopt, std::nullopt, c_l, c_minus, c_u};
  if (c_l > 0) {
    const auto l = static_cast<double>(c_l);
    r.ndpm = (2.0 * static_cast<double>(c_minus) + static_cast<double>(c_u)) / (2.0 * l);
    r.percent_compatible = (l - static_cast<double>(c_minus) - static_cast<double>(c_u)) / l;
  }
  return r;
}

namespace {

enum class PairOutcome { None, Agree, Reverse, Tie };

PairOutcome compare_pair(const ScoredLog &a, const ScoredLog &b) {
  if (a.truth == b.truth)
    return PairOutcome::None;
  if (a.prediction == b.prediction)
    return PairOutcome::Tie;
  return ((a.truth > b.truth) == (a.prediction > b.prediction)) ? PairOutcome::Agree
                                                                : PairOutcome::Reverse;
}

// Groups of consecutive logs sharing a user after a stable sort by user.
template <typename F> void for_each_user(std::span<const ScoredLog> logs, F &&f) {
  std::vector<ScoredLog> sorted(logs.begin(), logs.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ScoredLog &a, const ScoredLog &b) { return a.user < b.user; });
  for (std::size_t b = 0; b < sorted.size();) {
    std::size_t e = b;
    while (e < sorted.size() && sorted[e].user == sorted[b].user)
      ++e;
    f(std::span<const ScoredLog>(sorted.data() + b, e - b));
    b = e;
  }
}

} // namespace

NdpmResult ndpm(std::span<const ScoredLog> logs) {
  std::size_t c_l = 0, c_minus = 0, c_u = 0;
  for_each_user(logs, [&](std::span<const ScoredLog> g) {
    for (std::size_t a = 0; a < g.size(); ++a)
      for (std::size_t b = a + 1; b < g.size(); ++b) {
        const PairOutcome o = compare_pair(g[a], g[b]);
        if (o == PairOutcome::None)
          continue;
        ++c_l;
        c_minus += o == PairOutcome::Reverse;
        c_u += o == PairOutcome::Tie;
      }
  });
  return ndpm_from_counts(c_l, c_minus, c_u);
}

namespace {

std::optional<double> train_mean(const RatingsMatrix &train, Index u) {
  if (u < 0 || u >= train.n_users())
    return std::nullopt;
  return train.user_mean(u);
}

} // namespace

PrecisionResult precision_recall_f(std::span<const Recommendation> recs,
                                   const RatingsMatrix &train, const RatingsMatrix &test,
                                   std::optional<std::size_t> relevant_universe) {
  PrecisionResult r;
  for (const Recommendation &rec : recs) {
    const auto truth = test.rating(rec.user, rec.item);
    const auto mean = train_mean(train, rec.user);
    if (!truth || !mean)
      continue;
    ++r.evaluable;
    r.relevant += *truth >= *mean;
  }
  if (r.evaluable > 0)
    r.precision = static_cast<double>(r.relevant) / static_cast<double>(r.evaluable);
  if (relevant_universe && *relevant_universe > 0) {
    r.recall = static_cast<double>(r.relevant) / static_cast<double>(*relevant_universe);
    if (r.precision && (*r.precision + *r.recall) > 0.0)
      r.f = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
  }
  return r;
}

namespace {

double measure_of_impact(const RatingsMatrix &train, Index item, double truth, double mean,
                         Index catalog_size) {
  const Index count = item < train.n_items() ? train.item_count(item) : 0;
  const double magnitude = static_cast<double>(catalog_size) / std::max<Index>(count, 1);
  return truth >= mean ? magnitude : -magnitude;
}

} // namespace

ImpactResult impact(std::span<const Recommendation> recs, const RatingsMatrix &train,
                    const RatingsMatrix &test, Index catalog_size) {
  ImpactResult r;
  CompensatedSum smi;
  for (const Recommendation &rec : recs) {
    const auto truth = test.rating(rec.user, rec.item);
    const auto mean = train_mean(train, rec.user);
    if (!truth || !mean)
      continue;
    const double mi = measure_of_impact(train, rec.item, *truth, *mean, catalog_size);
    r.mi.push_back(mi);
    smi.add(mi);
  }
  r.smi = smi.value();
  if (!r.mi.empty())
    r.ami = r.smi / static_cast<double>(r.mi.size());
  return r;
}

// ---------------------------------------------------------------------------
// Report

void EvaluationReport::set(std::string task, std::string metric, std::string segment,
                           double value) {
  for (Record &r : records_)
    if (r.task == task && r.metric == metric && r.segment == segment) {
      r.value = value;
      return;
    }
  records_.push_back({std::move(task), std::move(metric), std::move(segment), value});
}

std::optional<double> EvaluationReport::get(std::string_view metric,
                                            std::string_view segment) const {
  for (const Record &r : records_)
    if (r.metric == metric && r.segment == segment)
      return r.value;
  return std::nullopt;
}

void EvaluationReport::append(const EvaluationReport &other) {
  for (const Record &r : other.records_)
    set(r.task, r.metric, r.segment, r.value);
  for (const auto &[k, v] : other.meta)
    meta[k] = v;
}

// ---------------------------------------------------------------------------
// Protocols

namespace {

int resolve_workers(int w) { return w > 0 ? w : default_workers(); }

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

struct ErrorCell {
  CompensatedSum se_out, se_in, ae;
  std::size_t n = 0, n_in = 0;

  void add(const ScoredLog &l) {
    const double d = l.prediction - l.truth;
    se_out.add(d * d);
    ae.add(std::abs(d));
    ++n;
    if (l.origin == Origin::MainModel) {
      se_in.add(d * d);
      ++n_in;
    }
  }
};

void emit_errors(EvaluationReport &rep, const std::string &seg, const ErrorCell &c) {
  rep.set("decide", "n", seg, static_cast<double>(c.n));
  rep.set("decide", "n-in", seg, static_cast<double>(c.n_in));
  rep.set("decide", "sse-out", seg, c.se_out.value());
  if (c.n == 0)
    return;
  const auto n = static_cast<double>(c.n);
  rep.set("decide", "rmse-out", seg, std::sqrt(c.se_out.value() / n));
  rep.set("decide", "mae", seg, c.ae.value() / n);
  rep.set("decide", "coverage", seg, static_cast<double>(c.n_in) / n);
  if (c.n_in > 0)
    rep.set("decide", "rmse-in", seg, std::sqrt(c.se_in.value() / static_cast<double>(c.n_in)));
}

struct PairCell {
  std::size_t c_l = 0, c_minus = 0, c_u = 0;
};

void emit_pairs(EvaluationReport &rep, const std::string &seg, const PairCell &c) {
  rep.set("compare", "pairs", seg, static_cast<double>(c.c_l));
  rep.set("compare", "pairs-reversed", seg, static_cast<double>(c.c_minus));
  rep.set("compare", "pairs-tied", seg, static_cast<double>(c.c_u));
  const NdpmResult r = ndpm_from_counts(c.c_l, c.c_minus, c.c_u);
  if (r.ndpm) {
    rep.set("compare", "ndpm", seg, *r.ndpm);
    rep.set("compare", "percent-compatible", seg, *r.percent_compatible);
  }
}

} // namespace

std::vector<ScoredLog> score_test(const Scorer &model, const RatingsMatrix &test, int workers) {
  const Index nu = test.n_users();
  std::vector<std::vector<ScoredLog>> per_user(static_cast<std::size_t>(nu));
#pragma omp parallel for schedule(dynamic, 16) num_threads(resolve_workers(workers))
  for (Index u = 0; u < nu; ++u) {
    const SparseView row = test.user_row(u);
    auto &out = per_user[static_cast<std::size_t>(u)];
    out.reserve(row.size());
    for (std::size_t k = 0; k < row.size(); ++k) {
      const Prediction p = model.predict(u, row.index[k]);
      out.push_back({u, row.index[k], row.value[k], p.value, p.origin});
    }
  }
  std::vector<ScoredLog> all;
  all.reserve(test.size());
  for (auto &v : per_user)
    all.insert(all.end(), v.begin(), v.end());
  return all;
}

EvaluationReport evaluate_scoring(const Scorer &model, const RatingsMatrix &train,
                                  const RatingsMatrix &test, const SegmentGrid &grid,
                                  const EvalOptions &options) {
  if (test.empty())
    throw DataError("empty test set");
  const auto start = std::chrono::steady_clock::now();
  EvaluationReport rep;
  rep.model = model.name();
  const std::vector<ScoredLog> scored = score_test(model, test, options.workers);
  rep.meta["decide.seconds"] = text::format_double(seconds_since(start));

  ErrorCell global;
  std::array<ErrorCell, 4> cells;
  // Reweighted by 1 / (count(u) * count(i)) from the train set.
  CompensatedSum wse, wsum;
  for (const ScoredLog &l : scored) {
    global.add(l);
    cells[static_cast<std::size_t>(grid.segment_of(l.user, l.item))].add(l);
    const Index cu = l.user < train.n_users() ? train.user_count(l.user) : 0;
    const Index ci = l.item < train.n_items() ? train.item_count(l.item) : 0;
    if (cu > 0 && ci > 0) {
      const double w = 1.0 / (static_cast<double>(cu) * static_cast<double>(ci));
      const double d = l.prediction - l.truth;
      wse.add(w * d * d);
      wsum.add(w);
    }
  }
  emit_errors(rep, "all", global);
  if (wsum.value() > 0.0)
    rep.set("decide", "rmse-estimated", "all", std::sqrt(wse.value() / wsum.value()));
  if (options.segments)
    for (Segment s : kAllSegments)
      emit_errors(rep, std::string(to_string(s)), cells[static_cast<std::size_t>(s)]);

  const auto t_compare = std::chrono::steady_clock::now();
  PairCell pall;
  std::array<PairCell, 4> pseg;
  PairCell heavy_cross, light_cross;
  for_each_user(scored, [&](std::span<const ScoredLog> g) {
    const bool heavy_u = grid.heavy_user(g.front().user);
    for (std::size_t a = 0; a < g.size(); ++a)
      for (std::size_t b = a + 1; b < g.size(); ++b) {
        const PairOutcome o = compare_pair(g[a], g[b]);
        if (o == PairOutcome::None)
          continue;
        const bool pa = grid.popular_item(g[a].item), pb = grid.popular_item(g[b].item);
        PairCell &cell = pa == pb ? pseg[static_cast<std::size_t>(make_segment(heavy_u, pa))]
                                  : (heavy_u ? heavy_cross : light_cross);
        for (PairCell *c : {&pall, &cell}) {
          ++c->c_l;
          c->c_minus += o == PairOutcome::Reverse;
          c->c_u += o == PairOutcome::Tie;
        }
      }
  });
  emit_pairs(rep, "all", pall);
  if (options.segments) {
    for (Segment s : kAllSegments)
      emit_pairs(rep, std::string(to_string(s)), pseg[static_cast<std::size_t>(s)]);
    emit_pairs(rep, "HX", heavy_cross);
    emit_pairs(rep, "LX", light_cross);
  }
  rep.meta["compare.seconds"] = text::format_double(seconds_since(t_compare));
  rep.meta["note.pairs"] = std::string(kPairAttributionNote);
  return rep;
}

std::vector<Recommendation> recommend_all(const Scorer &model, const RatingsMatrix &train,
                                          const RatingsMatrix &test, int n, int workers) {
  const Index nu = test.n_users();
  const Index ni = train.n_items();
  std::vector<std::vector<Recommendation>> per_user(static_cast<std::size_t>(nu));
#pragma omp parallel num_threads(resolve_workers(workers))
  {
    std::vector<double> scores(static_cast<std::size_t>(ni));
#pragma omp for schedule(dynamic, 8)
    for (Index u = 0; u < nu; ++u) {
      if (test.user_count(u) == 0)
        continue;
      model.score_all(u, scores);
      const SparseView profile = u < train.n_users() ? train.user_row(u) : SparseView{};
      for (const ScoredItem &s : full_catalog_top_n(profile, n, scores))
        per_user[static_cast<std::size_t>(u)].push_back({u, s.item});
    }
  }
  std::vector<Recommendation> all;
  for (auto &v : per_user)
    all.insert(all.end(), v.begin(), v.end());
  return all;
}

EvaluationReport evaluate_discovery(const Scorer &model, const RatingsMatrix &train,
                                    const RatingsMatrix &test, const SegmentGrid &grid,
                                    const EvalOptions &options) {
  if (test.empty())
    throw DataError("empty test set");
  const auto start = std::chrono::steady_clock::now();
  EvaluationReport rep;
  rep.model = model.name();
  const std::vector<Recommendation> recs =
      recommend_all(model, train, test, options.top_n, options.workers);

  struct Cell {
    std::size_t h = 0, relevant = 0;
    CompensatedSum smi;
  };
  Cell all;
  std::array<Cell, 4> cells;
  for (const Recommendation &r : recs) {
    const auto truth = test.rating(r.user, r.item);
    const auto mean = train_mean(train, r.user);
    if (!truth || !mean)
      continue;
    const double mi = measure_of_impact(train, r.item, *truth, *mean, train.n_items());
    for (Cell *c : {&all, &cells[static_cast<std::size_t>(grid.segment_of(r.user, r.item))]}) {
      ++c->h;
      c->relevant += *truth >= *mean;
      c->smi.add(mi);
    }
  }
  auto emit = [&](const std::string &seg, const Cell &c) {
    rep.set("discover", "evaluable", seg, static_cast<double>(c.h));
    rep.set("discover", "relevant", seg, static_cast<double>(c.relevant));
    rep.set("explore", "smi", seg, c.smi.value());
    if (c.h == 0)
      return;
    const auto h = static_cast<double>(c.h);
    rep.set("discover", "precision", seg, static_cast<double>(c.relevant) / h);
    rep.set("explore", "ami", seg, c.smi.value() / h);
  };
  rep.set("discover", "recommended", "all", static_cast<double>(recs.size()));
  emit("all", all);
  if (options.segments)
    for (Segment s : kAllSegments)
      emit(std::string(to_string(s)), cells[static_cast<std::size_t>(s)]);
  rep.meta["discover.seconds"] = text::format_double(seconds_since(start));
  rep.meta["discover.top_n"] = std::to_string(options.top_n);
  return rep;
}

// ---------------------------------------------------------------------------
// Writers

void write_report_text(std::ostream &out, const EvaluationReport &r) {
  out << "# reco-report schema=" << kReportSchema << '\n';
  out << "# " << kPairAttributionNote << '\n';
  out << "model=" << r.model << '\n';
  out << "fold=" << r.fold << '\n';
  for (const auto &[k, v] : r.meta)
    out << "meta." << k << '=' << v << '\n';
  for (const auto &rec : r.records())
    out << rec.task << '.' << rec.metric << '.' << rec.segment << '='
        << text::format_double(rec.value) << '\n';
}

void write_records_csv(std::ostream &out, std::span<const EvaluationReport> reports) {
  out << "schema,model,fold,task,metric,segment,value\n";
  for (const auto &r : reports)
    for (const auto &rec : r.records())
      out << kReportSchema << ',' << r.model << ',' << r.fold << ',' << rec.task << ','
          << rec.metric << ',' << rec.segment << ',' << text::format_double(rec.value) << '\n';
}

std::vector<EvaluationReport> read_records_csv(std::istream &in, std::string_view source) {
  std::vector<EvaluationReport> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line[0] == '#' || line.rfind("schema,", 0) == 0)
      continue;
    const auto f = text::split(line, ",");
    auto fail = [&](const std::string &what) {
      throw DataError(std::string(source) + ":" + std::to_string(lineno) + ": " + what);
    };
    if (f.size() != 7)
      fail("expected 7 fields");
    const auto schema = text::parse_int(f[0]);
    if (!schema || *schema != kReportSchema)
      fail("unsupported schema '" + std::string(f[0]) + "'");
    const auto fold = text::parse_int(f[2]);
    const auto value = text::parse_double(f[6]);
    if (!fold || !value)
      fail("cannot parse fold or value");
    const std::string model(f[1]);
    auto it = std::find_if(out.begin(), out.end(), [&](const EvaluationReport &r) {
      return r.model == model && r.fold == *fold;
    });
    if (it == out.end()) {
      out.emplace_back();
      out.back().model = model;
      out.back().fold = static_cast<int>(*fold);
      it = out.end() - 1;
    }
    it->set(std::string(f[3]), std::string(f[4]), std::string(f[5]), *value);
  }
  return out;
}

std::vector<WinnerCell> winners_grid(std::span<const EvaluationReport> reports) {
  struct Task {
    const char *task;
    const char *metric;
    bool lower_is_better;
  };
  static constexpr Task tasks[] = {{"decide", "rmse-out", true},
                                   {"compare", "percent-compatible", false},
                                   {"discover", "precision", false},
                                   {"explore", "ami", false}};
  std::set<std::string> models;
  for (const auto &r : reports)
    models.insert(r.model);
  std::vector<WinnerCell> grid;
  for (const Task &t : tasks)
    for (Segment s : kAllSegments) {
      WinnerCell cell{t.task, t.metric, s, "", 0.0};
      for (const std::string &model : models) {
        double sum = 0.0;
        int n = 0;
        for (const auto &r : reports)
          if (r.model == model)
            if (auto v = r.get(t.metric, to_string(s))) {
              sum += *v;
              ++n;
            }
        if (n == 0)
          continue;
        const double mean = sum / n;
        const bool better = cell.model.empty() ||
                            (t.lower_is_better ? mean < cell.value : mean > cell.value);
        if (better) {
          cell.model = model;
          cell.value = mean;
        }
      }
      grid.push_back(cell);
    }
  return grid;
}

void write_winners_grid(std::ostream &out, std::span<const WinnerCell> grid) {
  out << "task\tmetric";
  for (Segment s : kAllSegments)
    out << '\t' << to_string(s);
  out << '\n';
  for (std::size_t k = 0; k < grid.size(); k += 4) {
    out << grid[k].task << '\t' << grid[k].metric;
    for (std::size_t j = k; j < k + 4 && j < grid.size(); ++j) {
      if (grid[j].model.empty())
        out << "\t-";
      else
        out << '\t' << grid[j].model << " (" << text::format_double(grid[j].value) << ')';
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Cold start

std::string_view to_string(ColdStartMode m) {
  switch (m) {
  case ColdStartMode::Collaborative:
    return "collaborative";
  case ColdStartMode::Thematic:
    return "thematic";
  case ColdStartMode::HybridLight:
    return "hybrid-light";
  }
  return "?";
}

std::string_view to_string(ProfileRegime r) { return r == ProfileRegime::Long ? "long" : "short"; }

std::optional<double> ColdStartCurve::rmse_out(Index users, ColdStartMode mode,
                                               ProfileRegime regime) const {
  for (const auto &p : points)
    if (p.users == users && p.mode == mode && p.regime == regime)
      return p.rmse_out;
  return std::nullopt;
}

std::vector<Index> log_spaced_counts(Index max_users, Index start) {
  std::vector<Index> out;
  if (start < 1)
    start = 1;
  bool triple = true;
  for (Index c = start; c < max_users; triple = !triple) {
    out.push_back(c);
    c = triple ? c * 3 : static_cast<Index>(std::llround(c * 10.0 / 3.0));
  }
  out.push_back(max_users);
  return out;
}

ColdStartCurve cold_start_experiment(const RatingsMatrix &logs, const DescriptorCatalog &catalog,
                                     std::span<const Index> user_counts, ProfileRegime regime,
                                     std::span<const ColdStartMode> modes,
                                     const ColdStartOptions &options) {
  for (std::size_t k = 1; k < user_counts.size(); ++k)
    if (user_counts[k] <= user_counts[k - 1])
      throw UsageError("user counts must be strictly increasing");
  std::vector<Index> eligible;
  for (Index u = 0; u < logs.n_users(); ++u)
    if (logs.user_count(u) >= 2)
      eligible.push_back(u);
  Rng rng(options.seed);
  rng.shuffle(std::span(eligible));

  const bool thematic_needed =
      std::any_of(modes.begin(), modes.end(), [](ColdStartMode m) {
        return m != ColdStartMode::Collaborative;
      });
  SimilarityMatrix thematic;
  if (thematic_needed) {
    const RatingsMatrix descriptors = catalog.as_matrix(logs.item_ids());
    if (descriptors.empty())
      throw DataError("the descriptor catalog shares no item with the logs");
    thematic = knn_search(descriptors,
                          {options.k, SimilarityMeasure::Jaccard, options.workers});
  }

  ColdStartCurve curve;
  const double test_fraction = regime == ProfileRegime::Long ? 0.1 : 0.9;
  for (Index n : user_counts) {
    if (n > static_cast<Index>(eligible.size())) {
      warn("cold start: only " + std::to_string(eligible.size()) + " users available, skipping " +
           std::to_string(n));
      continue;
    }
    const RatingsMatrix sub =
        restrict_users(logs, std::span<const Index>(eligible.data(), static_cast<std::size_t>(n)));
    const Split split = split_train_test(sub, test_fraction, options.seed + static_cast<std::uint64_t>(n));
    if (split.test.empty())
      continue;
    for (ColdStartMode mode : modes) {
      std::vector<ScoredLog> scored;
      if (mode == ColdStartMode::Collaborative) {
        const SimilarityMatrix sm =
            knn_search(split.train, {options.k, options.collaborative_measure, options.workers});
        scored = score_test(KnnScorer(split.train, sm, ScoringMode::MeanBased), split.test,
                            options.workers);
      } else {
        const ScoringMode sm_mode =
            mode == ColdStartMode::Thematic ? ScoringMode::MonoUser : ScoringMode::MeanBased;
        scored = score_test(KnnScorer(split.train, thematic, sm_mode), split.test, options.workers);
      }
      const InOut io = rmse_in_out(scored);
      curve.points.push_back({n, mode, regime, io.rmse_in, io.rmse_out});
    }
  }
  return curve;
}

} // namespace reco
