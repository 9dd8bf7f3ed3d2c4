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
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reco/ratings.hpp"

namespace reco {

enum class SimilarityMeasure {
  Pearson,
  ExtendedPearson,
  Cosine,
  ExtendedCosine,
  Jaccard,
  Mix,
  ExtendedMix,
  WeightedPearson,
};

std::string_view to_string(SimilarityMeasure m);
/// Accepts the names printed by to_string plus short aliases (wpearson, ...).
SimilarityMeasure parse_measure(std::string_view name);

/// Sufficient statistics of one item pair. Sums run over the common raters
/// unless prefixed with "own", in which case they cover each item's full
/// rating set (the union denominator of the extended measures).
struct PairStats {
  Index common = 0;
  Index count_i = 0;
  Index count_j = 0;
  double dev_xy = 0, dev_xx = 0, dev_yy = 0; // mean-centred, over T_i n T_j
  double raw_xy = 0, raw_xx = 0, raw_yy = 0; // uncentred, over T_i n T_j
  double own_dev_i = 0, own_dev_j = 0;       // sum over T_i (T_j) of squared deviations
  double own_raw_i = 0, own_raw_j = 0;       // sum over T_i (T_j) of squared ratings
};

/// Evaluates a measure from pair statistics. Zero on an empty intersection or
/// a zero denominator.
double similarity_from_stats(SimilarityMeasure m, const PairStats &s);

/// Direct evaluation of one measure between two item columns of m.
/// Item means are taken over all ratings of each item.
double similarity(SimilarityMeasure m, const RatingsMatrix &ratings, Index i, Index j);

struct Neighbor {
  Index item;
  double weight;
};

/// Top-K neighbour lists, one per item of an id space.
///
/// Invariants: no self-neighbour, lists sorted by descending weight with ties
/// broken by ascending item index, at most K entries per list.
class SimilarityMatrix {
public:
  SimilarityMatrix() = default;
  /// Lists are re-sorted and truncated to k; self-neighbours are dropped.
  SimilarityMatrix(std::shared_ptr<const IdMap> items, int k, std::string measure,
                   std::vector<std::vector<Neighbor>> lists);

  Index n_items() const { return items_ ? items_->size() : 0; }
  int k() const { return k_; }
  const std::string &measure() const { return measure_; }
  const IdMap &items() const { return *items_; }
  std::shared_ptr<const IdMap> item_ids() const { return items_; }
  std::span<const Neighbor> neighbors(Index i) const;
  /// Stored weight of j in i's list, if present.
  std::optional<double> weight(Index i, Index j) const;
  std::size_t size() const { return entries_.size(); }

  std::uint64_t source_fingerprint() const { return fingerprint_; }
  void set_source_fingerprint(std::uint64_t f) { fingerprint_ = f; }

private:
  std::shared_ptr<const IdMap> items_;
  int k_ = 0;
  std::string measure_;
  std::uint64_t fingerprint_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> entries_;
};

/// Orders neighbours by descending weight, then ascending item.
inline bool neighbor_before(const Neighbor &a, const Neighbor &b) {
  return a.weight != b.weight ? a.weight > b.weight : a.item < b.item;
}

/// Keeps the k best candidates under neighbor_before, in order.
void select_top_k(std::vector<Neighbor> &candidates, int k);

struct KnnOptions {
  int k = 200;
  SimilarityMeasure measure = SimilarityMeasure::WeightedPearson;
  int workers = 0; // 0: default_workers()
};

/// Exact item-item K nearest neighbours over the columns of m. Pairs with
/// similarity exactly 0 are never stored. The result does not depend on the
/// number of workers.
SimilarityMatrix knn_search(const RatingsMatrix &m, const KnnOptions &options);

/// w * A + (1 - w) * B with missing entries read as 0, re-truncated to k.
SimilarityMatrix merge_matrices(const SimilarityMatrix &a, const SimilarityMatrix &b,
                                double w, int k);

/// Symmetric uniform weights in (0,1) for every pair, top k per item.
SimilarityMatrix random_similarity_matrix(std::shared_ptr<const IdMap> items, int k,
                                          std::uint64_t seed);

/// Text export: header line, then "i<TAB>j<TAB>weight" sorted by i and
/// descending weight. Item ids are written by name.
void write_similarity(std::ostream &out, const SimilarityMatrix &m);
void save_similarity(const std::filesystem::path &path, const SimilarityMatrix &m);
/// Rows are mapped into the given id space by name; unknown names are
/// skipped with a warning.
SimilarityMatrix read_similarity(std::istream &in, std::shared_ptr<const IdMap> items,
                                 std::string_view source = "<stream>");
SimilarityMatrix load_similarity(const std::filesystem::path &path,
                                 std::shared_ptr<const IdMap> items);

} // namespace reco
