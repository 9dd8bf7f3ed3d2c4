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

#include <Eigen/SparseCore>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "reco/core.hpp"

namespace reco {

/// Seconds since the Unix epoch. kNoDate sorts before every real date.
using Timestamp = std::int64_t;
inline constexpr Timestamp kNoDate = std::numeric_limits<Timestamp>::min();

/// Parses "YYYY-MM-DD" or "YYYY-MM-DDTHH:MM:SS[Z]".
std::optional<Timestamp> parse_iso8601(std::string_view s);
std::string format_iso8601(Timestamp t);

/// Bijection between opaque external ids and contiguous indices.
///
/// Ids are ordered numerically when every id is an integer and
/// lexicographically otherwise, so the same id set always gets the same
/// indices regardless of input order.
class IdMap {
public:
  IdMap() = default;
  static IdMap from_ids(std::vector<std::string> ids);

  Index size() const { return static_cast<Index>(names_.size()); }
  const std::string &name(Index i) const { return names_.at(i); }
  std::span<const std::string> names() const { return names_; }
  std::optional<Index> find(std::string_view id) const;
  /// Throws DataError for an unknown id.
  Index at(std::string_view id) const;

private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Index> lookup_;
};

/// One raw record of a rating log, as read from disk.
struct RatingLog {
  std::string user;
  std::string item;
  double rating = 0.0;
  Timestamp date = kNoDate;
};

/// One deduplicated log in index space.
struct Entry {
  Index user = 0;
  Index item = 0;
  double rating = 0.0;
  Timestamp date = kNoDate;
};

/// Non-owning view on a sparse row or column: sorted indices and values.
struct SparseView {
  std::span<const Index> index;
  std::span<const double> value;

  std::size_t size() const { return index.size(); }
  bool empty() const { return index.empty(); }
  /// Binary search; empty if absent.
  std::optional<double> find(Index j) const;
};

/// Immutable, dual-indexed sparse store of rating logs.
///
/// The user-major view (rows S_u) and the item-major view (columns T_i) hold
/// identical triples. Train and test matrices produced by a split share the
/// same id maps so indices are comparable between them.
class RatingsMatrix {
public:
  using ByUser = Eigen::SparseMatrix<double, Eigen::RowMajor, Index>;
  using ByItem = Eigen::SparseMatrix<double, Eigen::ColMajor, Index>;

  RatingsMatrix() = default;
  /// Entries must be unique per (user, item); ratings are checked against scale.
  RatingsMatrix(std::shared_ptr<const IdMap> users,
                std::shared_ptr<const IdMap> items, Scale scale,
                std::vector<Entry> entries);

  Index n_users() const { return users_ ? users_->size() : 0; }
  Index n_items() const { return items_ ? items_->size() : 0; }
  std::size_t size() const { return dates_.size(); }
  bool empty() const { return dates_.empty(); }
  Scale scale() const { return scale_; }

  const IdMap &users() const { return *users_; }
  const IdMap &items() const { return *items_; }
  std::shared_ptr<const IdMap> user_ids() const { return users_; }
  std::shared_ptr<const IdMap> item_ids() const { return items_; }

  const ByUser &by_user() const { return by_user_; }
  const ByItem &by_item() const { return by_item_; }

  SparseView user_row(Index u) const;
  SparseView item_col(Index i) const;
  /// Dates aligned with user_row(u).
  std::span<const Timestamp> user_dates(Index u) const;
  std::optional<double> rating(Index u, Index i) const;

  Index user_count(Index u) const;
  Index item_count(Index i) const;
  /// Users (items) with at least one rating.
  Index active_users() const { return active_users_; }
  Index active_items() const { return active_items_; }

  /// Arithmetic means; empty when the user/item has no rating.
  /// Indices outside the id space throw std::out_of_range.
  std::optional<double> user_mean(Index u) const;
  std::optional<double> item_mean(Index i) const;
  /// Item mean, only when the item has at least min_support ratings.
  std::optional<double> robust_item_mean(Index i, Index min_support = 10) const;
  double global_mean() const { return global_mean_; }

  /// Canonical (user, item)-sorted entries.
  std::vector<Entry> entries() const;

  /// Content hash over external ids, ratings and dates. Independent of the
  /// id space the matrix was loaded into.
  std::uint64_t fingerprint() const;

private:
  std::shared_ptr<const IdMap> users_;
  std::shared_ptr<const IdMap> items_;
  Scale scale_;
  ByUser by_user_;
  ByItem by_item_;
  std::vector<Timestamp> dates_;
  std::vector<double> user_sum_;
  std::vector<double> item_sum_;
  double global_mean_ = 0.0;
  Index active_users_ = 0;
  Index active_items_ = 0;
};

enum class LogFormat { Tsv, MovieLens };

/// Parses records, skipping blank and '#' lines. Parse failures throw
/// DataError naming the line number.
std::vector<RatingLog> parse_logs(std::istream &in, LogFormat format = LogFormat::Tsv,
                                  std::string_view source = "<stream>");

/// Deduplicates (latest date wins, then last occurrence), checks the scale and
/// builds the matrix. When id maps are given they must cover every id.
RatingsMatrix build_matrix(std::span<const RatingLog> logs, Scale scale,
                           std::shared_ptr<const IdMap> users = nullptr,
                           std::shared_ptr<const IdMap> items = nullptr);

RatingsMatrix load_logs(const std::filesystem::path &path, Scale scale,
                        LogFormat format = LogFormat::Tsv);

/// Loads two log files into one shared id space.
std::pair<RatingsMatrix, RatingsMatrix>
load_split(const std::filesystem::path &train, const std::filesystem::path &test,
           Scale scale, LogFormat format = LogFormat::Tsv);

void write_logs(std::ostream &out, const RatingsMatrix &m);
void save_logs(const std::filesystem::path &path, const RatingsMatrix &m);

/// Rebuild m over a different, larger id space (ids are matched by name).
RatingsMatrix reindex(const RatingsMatrix &m, std::shared_ptr<const IdMap> users,
                      std::shared_ptr<const IdMap> items);

enum class SplitMode { PerUser, Global };

struct Split {
  RatingsMatrix train;
  RatingsMatrix test;
};

/// Per-user stratified random split: round(|S_u| * fraction) logs per user go
/// to test, capped at |S_u| - 1 for users with two or more logs.
Split split_train_test(const RatingsMatrix &m, double test_fraction,
                       std::uint64_t seed, SplitMode mode = SplitMode::PerUser);

/// Each user's logs are shuffled and dealt round-robin into k folds.
std::vector<Split> kfold(const RatingsMatrix &m, int k, std::uint64_t seed);

/// Users become items and items become users.
RatingsMatrix transpose(const RatingsMatrix &m);

/// Keeps only the logs of the given users; the id space is unchanged.
RatingsMatrix restrict_users(const RatingsMatrix &m, std::span<const Index> users);

/// Table-style summary of a log set.
struct LogStats {
  std::size_t logs = 0;
  Index users = 0;
  Index items = 0;
  double sparsity = 0.0; // fraction of missing cells over active users x items
  double global_mean = 0.0;
  double ratings_per_user = 0.0;
  double ratings_per_item = 0.0;
};

LogStats describe(const RatingsMatrix &m);

} // namespace reco
