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

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reco/knn.hpp"
#include "reco/random.hpp"
#include "reco/ratings.hpp"
#include "reco/similarity.hpp"

namespace reco {

struct GravityParams {
  int factors = 16;
  double learning_rate = 0.030;
  double regularization = 0.008;
  int max_epochs = 200;
  int patience = 3;
  std::optional<double> wall_clock_seconds;
  double validation_fraction = 0.005;
  std::uint64_t seed = 0;
  double clamp = 1.0;
  double init_range = 0.01;
  /// Column 0 of P and column 1 of Q are fixed to 1, so Q's column 0 carries
  /// the item bias and P's column 1 the user bias.
  bool bias = true;

  /// Throws UsageError.
  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double train_rmse = 0.0;
  double validation_rmse = 0.0;
};

/// User and item factor tables, one row per id of the train id space.
/// Ratings live in [0,1] inside the model.
template <typename Scalar> struct FactorModel {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Matrix P;
  Matrix Q;
  Scale scale;
  GravityParams params;
  std::shared_ptr<const IdMap> users = std::make_shared<IdMap>();
  std::shared_ptr<const IdMap> items = std::make_shared<IdMap>();
  /// Users and items that have at least one training log.
  std::vector<char> known_user;
  std::vector<char> known_item;
  std::vector<EpochStats> curve;
  int best_epoch = 0;
  std::uint64_t train_fingerprint = 0;
  std::uint64_t config_hash = 0;

  int factors() const { return static_cast<int>(P.cols()); }
  Index n_users() const { return static_cast<Index>(P.rows()); }
  Index n_items() const { return static_cast<Index>(Q.rows()); }
  bool user_fixed(int k) const { return params.bias && k == 0; }
  bool item_fixed(int k) const { return params.bias && k == 1; }
  bool knows_user(Index u) const {
    return u >= 0 && u < n_users() && known_user[static_cast<std::size_t>(u)];
  }
  bool knows_item(Index i) const {
    return i >= 0 && i < n_items() && known_item[static_cast<std::size_t>(i)];
  }

  Scalar normalize(double r) const { return static_cast<Scalar>((r - scale.lo) / scale.width()); }
  double denormalize(Scalar x) const {
    return scale.clamp(scale.lo + static_cast<double>(x) * scale.width());
  }
};

using GravityModel = FactorModel<double>;

/// Free factors uniform in [-init_range, init_range], fixed columns set to 1.
/// Throws UsageError when the bias convention leaves no free factor.
template <typename Scalar>
FactorModel<Scalar> init_model(std::shared_ptr<const IdMap> users,
                               std::shared_ptr<const IdMap> items, Scale scale,
                               const GravityParams &params) {
  params.validate();
  FactorModel<Scalar> m;
  m.scale = scale;
  m.params = params;
  m.users = std::move(users);
  m.items = std::move(items);
  const int K = params.factors;
  m.P.resize(m.users->size(), K);
  m.Q.resize(m.items->size(), K);
  m.known_user.assign(static_cast<std::size_t>(m.users->size()), 0);
  m.known_item.assign(static_cast<std::size_t>(m.items->size()), 0);
  Rng rng(params.seed);
  auto fill = [&](auto &M, auto fixed) {
    for (Eigen::Index r = 0; r < M.rows(); ++r)
      for (int k = 0; k < K; ++k) {
        const double v = rng.uniform(-params.init_range, params.init_range);
        M(r, k) = fixed(k) ? Scalar(1) : static_cast<Scalar>(v);
      }
  };
  fill(m.P, [&](int k) { return m.user_fixed(k); });
  fill(m.Q, [&](int k) { return m.item_fixed(k); });
  return m;
}

/// Scalar product of the factor rows, in normalized units, unclamped.
template <typename Scalar>
Scalar predict_normalized(const FactorModel<Scalar> &m, Index u, Index i) {
  return m.P.row(u).dot(m.Q.row(i));
}

/// Prediction on the rating scale. Throws DataError for a user or item the
/// model has no training log for.
template <typename Scalar> double predict(const FactorModel<Scalar> &m, Index u, Index i) {
  if (!m.knows_user(u))
    throw DataError("user index " + std::to_string(u) + " unknown to the factor model");
  if (!m.knows_item(i))
    throw DataError("item index " + std::to_string(i) + " unknown to the factor model");
  return m.denormalize(predict_normalized(m, u, i));
}

/// One stochastic gradient step on a normalized rating. The error is taken
/// before any update and both factor rows move from their old values; results
/// are clipped to [-clamp, clamp]. Returns the error.
template <typename Scalar>
Scalar sgd_step(FactorModel<Scalar> &m, Index u, Index i, Scalar r, Scalar alpha,
                Scalar lambda) {
  auto p = m.P.row(u);
  auto q = m.Q.row(i);
  const Scalar e = r - p.dot(q);
  const auto c = static_cast<Scalar>(m.params.clamp);
  for (int k = 0; k < m.factors(); ++k) {
    const Scalar pk = p(k), qk = q(k);
    if (!m.user_fixed(k))
      p(k) = std::clamp<Scalar>(pk + alpha * (e * qk - lambda * pk), -c, c);
    if (!m.item_fixed(k))
      q(k) = std::clamp<Scalar>(qk + alpha * (e * pk - lambda * qk), -c, c);
  }
  return e;
}

/// Seeded SGD with a held-out validation slice and early stopping. Returns the
/// snapshot with the lowest validation RMSE. Single-threaded and
/// deterministic for fixed (train, params).
GravityModel train_gravity(const RatingsMatrix &train, const GravityParams &params);

enum class FactorMeasure { Pearson, Cosine, NegEuclidean };

std::string_view to_string(FactorMeasure m);
FactorMeasure parse_factor_measure(std::string_view name);

/// Item-item neighbours computed on the rows of Q. The constant fixed column
/// is left out; items without training logs get no neighbours.
SimilarityMatrix factor_similarity_matrix(const GravityModel &m, int k,
                                          FactorMeasure measure = FactorMeasure::Pearson,
                                          int workers = 0);

/// Similarity of two dense vectors under a factor-space measure.
double dense_similarity(FactorMeasure measure, std::span<const double> a,
                        std::span<const double> b);

/// Little-endian binary layout:
///   "RGRV" u32 version, u32 K, u32 users, u32 items, f64 lo, f64 hi,
///   u64 seed, f64 alpha, f64 lambda, u32 max_epochs, u32 patience,
///   f64 wall_clock (NaN if none), f64 validation_fraction, f64 clamp,
///   f64 init_range, u8 bias, u64 train_fingerprint, u64 config_hash,
///   u32 best_epoch,
///   u32 epochs, {u32 epoch, f64 train, f64 validation} per epoch,
///   {u32 length, bytes} per user id then per item id,
///   u8 known flag per user then per item, P then Q as row-major f64.
void save_model(const std::filesystem::path &path, const GravityModel &m);
GravityModel load_model(const std::filesystem::path &path);
void write_model(std::ostream &out, const GravityModel &m);
GravityModel read_model(std::istream &in);

/// The same factors over another id space, matched by name. Ids the model
/// does not have become unknown.
GravityModel reindex_model(const GravityModel &m, std::shared_ptr<const IdMap> users,
                           std::shared_ptr<const IdMap> items);

/// Text export with shortest round-trip decimals, for diffing.
void export_model_text(std::ostream &out, const GravityModel &m);

/// Factor model scoring; users or items the model never saw go through the
/// collaborative default predictor and are tagged as such.
class GravityScorer : public Scorer {
public:
  GravityScorer(const GravityModel &model, const RatingsMatrix &train,
                std::string name = "gravity");
  std::string name() const override { return name_; }
  Prediction predict(Index u, Index i) const override;
  void score_all(Index u, std::span<double> out) const override;

private:
  const GravityModel &model_;
  const RatingsMatrix &train_;
  std::string name_;
};

} // namespace reco
