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
#include "reco/gravity.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "text.hpp"

namespace reco {

void GravityParams::validate() const {
  if (factors < 1)
    throw UsageError("factor count must be at least 1");
  if (bias && factors < 3)
    throw UsageError("the bias convention needs at least 3 factors");
  if (!(learning_rate > 0.0))
    throw UsageError("learning rate must be positive");
  if (!(regularization >= 0.0))
    throw UsageError("regularization must be non-negative");
  if (patience < 1)
    throw UsageError("patience must be at least 1");
  if (max_epochs < 1)
    throw UsageError("max epochs must be at least 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 0.5))
    throw UsageError("validation fraction must lie in (0, 0.5)");
  if (!(clamp > 0.0))
    throw UsageError("factor clamp bound must be positive");
  if (!(init_range >= 0.0 && init_range <= clamp))
    throw UsageError("init range must lie in [0, clamp]");
  if (wall_clock_seconds && !(*wall_clock_seconds > 0.0))
    throw UsageError("wall-clock cap must be positive");
}

namespace {

double rmse_of(const GravityModel &m, std::span<const Entry> logs) {
  if (logs.empty())
    return std::numeric_limits<double>::quiet_NaN();
  CompensatedSum se;
  for (const Entry &e : logs) {
    const double d = m.denormalize(predict_normalized(m, e.user, e.item)) - e.rating;
    se.add(d * d);
  }
  return std::sqrt(se.value() / static_cast<double>(logs.size()));
}

} // namespace

GravityModel train_gravity(const RatingsMatrix &train, const GravityParams &params) {
  params.validate();
  if (train.empty())
    throw DataError("cannot train a factor model on an empty train set");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  GravityModel m = init_model<double>(train.user_ids(), train.item_ids(), train.scale(), params);
  m.train_fingerprint = train.fingerprint();

  std::vector<Entry> logs = train.entries();
  Rng rng(params.seed ^ 0x6a09e667f3bcc909ULL);
  rng.shuffle(std::span(logs));
  auto n_val = static_cast<std::size_t>(
      std::llround(params.validation_fraction * static_cast<double>(logs.size())));
  if (n_val == 0 && logs.size() >= 2)
    n_val = 1;
  const std::span<const Entry> validation(logs.data(), n_val);
  std::vector<Entry> fit(logs.begin() + static_cast<std::ptrdiff_t>(n_val), logs.end());
  for (const Entry &e : fit) {
    m.known_user[static_cast<std::size_t>(e.user)] = 1;
    m.known_item[static_cast<std::size_t>(e.item)] = 1;
  }

  const double alpha = params.learning_rate, lambda = params.regularization;
  GravityModel::Matrix bestP = m.P, bestQ = m.Q;
  double best = std::numeric_limits<double>::infinity();
  double previous = best;
  int rising = 0;
  for (int epoch = 1; epoch <= params.max_epochs; ++epoch) {
    rng.shuffle(std::span(fit));
    for (const Entry &e : fit)
      sgd_step(m, e.user, e.item, m.normalize(e.rating), alpha, lambda);
    EpochStats s;
    s.epoch = epoch;
    s.train_rmse = rmse_of(m, fit);
    // Without a validation slice the train error stands in.
    s.validation_rmse = validation.empty() ? s.train_rmse : rmse_of(m, validation);
    m.curve.push_back(s);
    if (s.validation_rmse < best) {
      best = s.validation_rmse;
      bestP = m.P;
      bestQ = m.Q;
      m.best_epoch = epoch;
    }
    rising = s.validation_rmse > previous ? rising + 1 : 0;
    previous = s.validation_rmse;
    if (rising >= params.patience)
      break;
    if (params.wall_clock_seconds &&
        std::chrono::duration<double>(Clock::now() - start).count() >= *params.wall_clock_seconds)
      break;
  }
  m.P = std::move(bestP);
  m.Q = std::move(bestQ);
  return m;
}

// ---------------------------------------------------------------------------
// Factor-space similarity

std::string_view to_string(FactorMeasure m) {
  switch (m) {
  case FactorMeasure::Pearson:
    return "pearson";
  case FactorMeasure::Cosine:
    return "cosine";
  case FactorMeasure::NegEuclidean:
    return "neg-euclidean";
  }
  return "?";
}

FactorMeasure parse_factor_measure(std::string_view name) {
  if (name == "pearson")
    return FactorMeasure::Pearson;
  if (name == "cosine")
    return FactorMeasure::Cosine;
  if (name == "neg-euclidean" || name == "negeuclidean")
    return FactorMeasure::NegEuclidean;
  throw UsageError("unknown factor-space measure '" + std::string(name) + "'");
}

double dense_similarity(FactorMeasure measure, std::span<const double> a,
                        std::span<const double> b) {
  using Vec = Eigen::Map<const Eigen::VectorXd>;
  const Vec x(a.data(), static_cast<Eigen::Index>(a.size()));
  const Vec y(b.data(), static_cast<Eigen::Index>(b.size()));
  switch (measure) {
  case FactorMeasure::NegEuclidean:
    return -(x - y).norm();
  case FactorMeasure::Cosine: {
    const double d = x.norm() * y.norm();
    return d == 0.0 ? 0.0 : x.dot(y) / d;
  }
  case FactorMeasure::Pearson: {
    const Eigen::VectorXd cx = x.array() - x.mean();
    const Eigen::VectorXd cy = y.array() - y.mean();
    const double d = cx.norm() * cy.norm();
    return d == 0.0 ? 0.0 : cx.dot(cy) / d;
  }
  }
  return 0.0;
}

SimilarityMatrix factor_similarity_matrix(const GravityModel &m, int k, FactorMeasure measure,
                                          int workers) {
  if (k < 1)
    throw UsageError("K must be at least 1");
  const Index n = m.n_items();
  const int K = m.factors();
  std::vector<int> cols;
  for (int c = 0; c < K; ++c)
    if (!m.item_fixed(c))
      cols.push_back(c);
  const auto F = static_cast<Eigen::Index>(cols.size());

  // Rows prepared once so that each pair costs one dot product.
  Eigen::MatrixXd X(F, n);
  for (Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < F; ++c)
      X(c, i) = m.Q(i, cols[static_cast<std::size_t>(c)]);
  Eigen::VectorXd sq(n);
  if (measure == FactorMeasure::Pearson)
    X.rowwise() -= X.colwise().mean();
  for (Index i = 0; i < n; ++i) {
    sq(i) = X.col(i).squaredNorm();
    if (measure != FactorMeasure::NegEuclidean) {
      const double norm = std::sqrt(sq(i));
      X.col(i) = norm > 0.0 ? (X.col(i) / norm).eval() : Eigen::VectorXd::Zero(F);
    }
  }

  std::vector<std::vector<Neighbor>> lists(static_cast<std::size_t>(n));
  const int threads = workers > 0 ? workers : default_workers();
#pragma omp parallel num_threads(threads)
  {
    Eigen::VectorXd dots(n);
    std::vector<Neighbor> cand;
#pragma omp for schedule(dynamic, 16)
    for (Index i = 0; i < n; ++i) {
      if (!m.known_item[static_cast<std::size_t>(i)])
        continue;
      dots.noalias() = X.transpose() * X.col(i);
      cand.clear();
      for (Index j = 0; j < n; ++j) {
        if (j == i || !m.known_item[static_cast<std::size_t>(j)])
          continue;
        double w = dots(j);
        if (measure == FactorMeasure::NegEuclidean)
          w = -std::sqrt(std::max(0.0, sq(i) + sq(j) - 2.0 * w));
        if (w != 0.0)
          cand.push_back({j, w});
      }
      select_top_k(cand, k);
      lists[static_cast<std::size_t>(i)] = cand;
    }
  }
  SimilarityMatrix sm(m.items, k, "factor-" + std::string(to_string(measure)), std::move(lists));
  sm.set_source_fingerprint(m.train_fingerprint);
  return sm;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr char kMagic[4] = {'R', 'G', 'R', 'V'};
constexpr std::uint32_t kVersion = 1;

template <typename T> T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

class Writer {
public:
  explicit Writer(std::ostream &out) : out_(out) {}
  template <typename T> void put(T v) {
    v = to_little(v);
    out_.write(reinterpret_cast<const char *>(&v), sizeof(T));
  }
  void str(const std::string &s) {
    put(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

private:
  std::ostream &out_;
};

class Reader {
public:
  explicit Reader(std::istream &in) : in_(in) {}
  template <typename T> T get() {
    T v;
    if (!in_.read(reinterpret_cast<char *>(&v), sizeof(T)))
      throw DataError("truncated factor model file");
    return to_little(v);
  }
  std::string str() {
    const auto n = get<std::uint32_t>();
    std::string s(n, '\0');
    if (!in_.read(s.data(), n))
      throw DataError("truncated factor model file");
    return s;
  }

private:
  std::istream &in_;
};

std::shared_ptr<const IdMap> read_ids(Reader &r, std::uint32_t n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::uint32_t k = 0; k < n; ++k)
    ids.push_back(r.str());
  auto map = std::make_shared<IdMap>(IdMap::from_ids(ids));
  for (std::uint32_t k = 0; k < n; ++k)
    if (map->name(static_cast<Index>(k)) != ids[k])
      throw DataError("factor model id table is not in canonical order");
  return map;
}

} // namespace

void write_model(std::ostream &out, const GravityModel &m) {
  Writer w(out);
  out.write(kMagic, 4);
  w.put(kVersion);
  w.put(static_cast<std::uint32_t>(m.factors()));
  w.put(static_cast<std::uint32_t>(m.n_users()));
  w.put(static_cast<std::uint32_t>(m.n_items()));
  w.put(m.scale.lo);
  w.put(m.scale.hi);
  const GravityParams &p = m.params;
  w.put(p.seed);
  w.put(p.learning_rate);
  w.put(p.regularization);
  w.put(static_cast<std::uint32_t>(p.max_epochs));
  w.put(static_cast<std::uint32_t>(p.patience));
  w.put(p.wall_clock_seconds.value_or(std::numeric_limits<double>::quiet_NaN()));
  w.put(p.validation_fraction);
  w.put(p.clamp);
  w.put(p.init_range);
  w.put(static_cast<std::uint8_t>(p.bias));
  w.put(m.train_fingerprint);
  w.put(m.config_hash);
  w.put(static_cast<std::uint32_t>(m.best_epoch));
  w.put(static_cast<std::uint32_t>(m.curve.size()));
  for (const EpochStats &s : m.curve) {
    w.put(static_cast<std::uint32_t>(s.epoch));
    w.put(s.train_rmse);
    w.put(s.validation_rmse);
  }
  for (const auto &name : m.users->names())
    w.str(name);
  for (const auto &name : m.items->names())
    w.str(name);
  for (char c : m.known_user)
    w.put(static_cast<std::uint8_t>(c));
  for (char c : m.known_item)
    w.put(static_cast<std::uint8_t>(c));
  for (Eigen::Index k = 0; k < m.P.size(); ++k)
    w.put(m.P.data()[k]);
  for (Eigen::Index k = 0; k < m.Q.size(); ++k)
    w.put(m.Q.data()[k]);
  if (!out)
    throw DataError("failed to write factor model");
}

GravityModel read_model(std::istream &in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("not a factor model file");
  Reader r(in);
  if (const auto v = r.get<std::uint32_t>(); v != kVersion)
    throw DataError("unsupported factor model version " + std::to_string(v));
  GravityModel m;
  const auto K = r.get<std::uint32_t>();
  const auto nu = r.get<std::uint32_t>();
  const auto ni = r.get<std::uint32_t>();
  m.scale.lo = r.get<double>();
  m.scale.hi = r.get<double>();
  GravityParams &p = m.params;
  p.factors = static_cast<int>(K);
  p.seed = r.get<std::uint64_t>();
  p.learning_rate = r.get<double>();
  p.regularization = r.get<double>();
  p.max_epochs = static_cast<int>(r.get<std::uint32_t>());
  p.patience = static_cast<int>(r.get<std::uint32_t>());
  if (const double wc = r.get<double>(); !std::isnan(wc))
    p.wall_clock_seconds = wc;
  p.validation_fraction = r.get<double>();
  p.clamp = r.get<double>();
  p.init_range = r.get<double>();
  p.bias = r.get<std::uint8_t>() != 0;
  m.train_fingerprint = r.get<std::uint64_t>();
  m.config_hash = r.get<std::uint64_t>();
  m.best_epoch = static_cast<int>(r.get<std::uint32_t>());
  const auto epochs = r.get<std::uint32_t>();
  for (std::uint32_t e = 0; e < epochs; ++e) {
    EpochStats s;
    s.epoch = static_cast<int>(r.get<std::uint32_t>());
    s.train_rmse = r.get<double>();
    s.validation_rmse = r.get<double>();
    m.curve.push_back(s);
  }
  m.users = read_ids(r, nu);
  m.items = read_ids(r, ni);
  m.known_user.resize(nu);
  m.known_item.resize(ni);
  for (auto &c : m.known_user)
    c = static_cast<char>(r.get<std::uint8_t>());
  for (auto &c : m.known_item)
    c = static_cast<char>(r.get<std::uint8_t>());
  m.P.resize(nu, K);
  m.Q.resize(ni, K);
  for (Eigen::Index k = 0; k < m.P.size(); ++k)
    m.P.data()[k] = r.get<double>();
  for (Eigen::Index k = 0; k < m.Q.size(); ++k)
    m.Q.data()[k] = r.get<double>();
  p.validate();
  return m;
}

void save_model(const std::filesystem::path &path, const GravityModel &m) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw DataError("cannot open " + path.string() + " for writing");
  write_model(out, m);
}

GravityModel load_model(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError("cannot open " + path.string());
  return read_model(in);
}

GravityModel reindex_model(const GravityModel &m, std::shared_ptr<const IdMap> users,
                           std::shared_ptr<const IdMap> items) {
  GravityModel out;
  out.scale = m.scale;
  out.params = m.params;
  out.curve = m.curve;
  out.best_epoch = m.best_epoch;
  out.train_fingerprint = m.train_fingerprint;
  out.config_hash = m.config_hash;
  auto move_rows = [](const GravityModel::Matrix &from, const IdMap &from_ids,
                      const std::vector<char> &from_known, const IdMap &to_ids,
                      GravityModel::Matrix &to, std::vector<char> &to_known) {
    to = GravityModel::Matrix::Zero(to_ids.size(), from.cols());
    to_known.assign(static_cast<std::size_t>(to_ids.size()), 0);
    for (Index r = 0; r < to_ids.size(); ++r)
      if (const auto k = from_ids.find(to_ids.name(r))) {
        to.row(r) = from.row(*k);
        to_known[static_cast<std::size_t>(r)] = from_known[static_cast<std::size_t>(*k)];
      }
  };
  move_rows(m.P, *m.users, m.known_user, *users, out.P, out.known_user);
  move_rows(m.Q, *m.items, m.known_item, *items, out.Q, out.known_item);
  out.users = std::move(users);
  out.items = std::move(items);
  return out;
}

void export_model_text(std::ostream &out, const GravityModel &m) {
  const GravityParams &p = m.params;
  out << "# reco-gravity v1 factors=" << m.factors() << " users=" << m.n_users()
      << " items=" << m.n_items() << " scale=" << text::format_double(m.scale.lo) << ','
      << text::format_double(m.scale.hi) << " seed=" << p.seed
      << " alpha=" << text::format_double(p.learning_rate)
      << " lambda=" << text::format_double(p.regularization) << " bias=" << (p.bias ? 1 : 0)
      << " best_epoch=" << m.best_epoch << " fingerprint=" << to_hex(m.train_fingerprint)
      << " config=" << to_hex(m.config_hash) << '\n';
  for (const EpochStats &s : m.curve)
    out << "epoch\t" << s.epoch << '\t' << text::format_double(s.train_rmse) << '\t'
        << text::format_double(s.validation_rmse) << '\n';
  auto rows = [&](char tag, const GravityModel::Matrix &M, const IdMap &ids,
                  const std::vector<char> &known) {
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
      out << tag << '\t' << ids.name(static_cast<Index>(r)) << '\t'
          << (known[static_cast<std::size_t>(r)] ? 1 : 0);
      for (Eigen::Index k = 0; k < M.cols(); ++k)
        out << '\t' << text::format_double(M(r, k));
      out << '\n';
    }
  };
  rows('P', m.P, *m.users, m.known_user);
  rows('Q', m.Q, *m.items, m.known_item);
}

// ---------------------------------------------------------------------------
// Scoring

GravityScorer::GravityScorer(const GravityModel &model, const RatingsMatrix &train,
                             std::string name)
    : model_(model), train_(train), name_(std::move(name)) {
  if (model.n_users() != train.n_users() || model.n_items() != train.n_items())
    throw UsageError("factor model and train set have different id spaces");
}

Prediction GravityScorer::predict(Index u, Index i) const {
  if (model_.knows_user(u) && model_.knows_item(i)) {
    Prediction p;
    p.value = reco::predict(model_, u, i);
    p.origin = Origin::MainModel;
    return p;
  }
  const SparseView row = u >= 0 && u < train_.n_users() ? train_.user_row(u) : SparseView{};
  return default_predict(row, i, train_, DefaultMode::Collaborative);
}

void GravityScorer::score_all(Index u, std::span<double> out) const {
  if (!model_.knows_user(u)) {
    Scorer::score_all(u, out);
    return;
  }
  for (Index i = 0; i < static_cast<Index>(out.size()); ++i)
    out[i] = model_.knows_item(i) ? model_.denormalize(predict_normalized(model_, u, i))
                                  : predict(u, i).value;
}

} // namespace reco
