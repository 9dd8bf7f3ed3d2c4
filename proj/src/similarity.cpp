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
#include "reco/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "reco/log.hpp"
#include "reco/random.hpp"
#include "text.hpp"

namespace reco {

std::string_view to_string(SimilarityMeasure m) {
  switch (m) {
  case SimilarityMeasure::Pearson:
    return "pearson";
  case SimilarityMeasure::ExtendedPearson:
    return "extended-pearson";
  case SimilarityMeasure::Cosine:
    return "cosine";
  case SimilarityMeasure::ExtendedCosine:
    return "extended-cosine";
  case SimilarityMeasure::Jaccard:
    return "jaccard";
  case SimilarityMeasure::Mix:
    return "mix";
  case SimilarityMeasure::ExtendedMix:
    return "extended-mix";
  case SimilarityMeasure::WeightedPearson:
    return "weighted-pearson";
  }
  return "?";
}

SimilarityMeasure parse_measure(std::string_view name) {
  static const std::map<std::string, SimilarityMeasure, std::less<>> names = {
      {"pearson", SimilarityMeasure::Pearson},
      {"extended-pearson", SimilarityMeasure::ExtendedPearson},
      {"epearson", SimilarityMeasure::ExtendedPearson},
      {"cosine", SimilarityMeasure::Cosine},
      {"extended-cosine", SimilarityMeasure::ExtendedCosine},
      {"ecosine", SimilarityMeasure::ExtendedCosine},
      {"jaccard", SimilarityMeasure::Jaccard},
      {"mix", SimilarityMeasure::Mix},
      {"extended-mix", SimilarityMeasure::ExtendedMix},
      {"emix", SimilarityMeasure::ExtendedMix},
      {"weighted-pearson", SimilarityMeasure::WeightedPearson},
      {"wpearson", SimilarityMeasure::WeightedPearson},
  };
  auto it = names.find(name);
  if (it == names.end())
    throw UsageError("unknown similarity measure '" + std::string(name) + "'");
  return it->second;
}

namespace {

double ratio(double num, double den_sq) {
  if (den_sq <= 0.0)
    return 0.0;
  const double r = num / std::sqrt(den_sq);
  // Rounding noise around an exact zero would otherwise become a neighbour
  // whose sign decides the prediction.
  if (std::abs(r) < 1e-12)
    return 0.0;
  return std::clamp(r, -1.0, 1.0);
}

double jaccard_of(const PairStats &s) {
  const Index uni = s.count_i + s.count_j - s.common;
  return uni > 0 ? static_cast<double>(s.common) / uni : 0.0;
}

bool uses_deviations(SimilarityMeasure m) {
  return m != SimilarityMeasure::Cosine && m != SimilarityMeasure::ExtendedCosine &&
         m != SimilarityMeasure::Jaccard;
}

} // namespace

double similarity_from_stats(SimilarityMeasure m, const PairStats &s) {
  if (s.common == 0)
    return 0.0;
  switch (m) {
  case SimilarityMeasure::Pearson:
    return ratio(s.dev_xy, s.dev_xx * s.dev_yy);
  case SimilarityMeasure::ExtendedPearson:
    return ratio(s.dev_xy, s.own_dev_i * s.own_dev_j);
  case SimilarityMeasure::Cosine:
    return ratio(s.raw_xy, s.raw_xx * s.raw_yy);
  case SimilarityMeasure::ExtendedCosine:
    return ratio(s.raw_xy, s.own_raw_i * s.own_raw_j);
  case SimilarityMeasure::Jaccard:
    return jaccard_of(s);
  case SimilarityMeasure::Mix:
    return jaccard_of(s) * (1.0 + ratio(s.dev_xy, s.dev_xx * s.dev_yy)) / 2.0;
  case SimilarityMeasure::ExtendedMix:
    return jaccard_of(s) * (1.0 + ratio(s.dev_xy, s.own_dev_i * s.own_dev_j)) / 2.0;
  case SimilarityMeasure::WeightedPearson:
    return jaccard_of(s) * ratio(s.dev_xy, s.dev_xx * s.dev_yy);
  }
  return 0.0;
}

namespace {

struct ItemTotals {
  std::vector<double> mean;
  std::vector<double> own_dev; // sum of squared deviations over the column
  std::vector<double> own_raw; // sum of squared ratings over the column
};

ItemTotals item_totals(const RatingsMatrix &m) {
  ItemTotals t;
  const auto n = static_cast<std::size_t>(m.n_items());
  t.mean.assign(n, 0.0);
  t.own_dev.assign(n, 0.0);
  t.own_raw.assign(n, 0.0);
  for (Index i = 0; i < m.n_items(); ++i) {
    const SparseView col = m.item_col(i);
    if (col.empty())
      continue;
    const double mu = *m.item_mean(i);
    t.mean[i] = mu;
    for (double r : col.value) {
      t.own_dev[i] += (r - mu) * (r - mu);
      t.own_raw[i] += r * r;
    }
  }
  return t;
}

} // namespace

double similarity(SimilarityMeasure measure, const RatingsMatrix &m, Index i, Index j) {
  if (i < 0 || i >= m.n_items() || j < 0 || j >= m.n_items())
    throw DataError("unknown item index in similarity");
  const SparseView a = m.item_col(i), b = m.item_col(j);
  PairStats s;
  s.count_i = static_cast<Index>(a.size());
  s.count_j = static_cast<Index>(b.size());
  if (a.empty() || b.empty())
    return 0.0;
  const double mi = *m.item_mean(i), mj = *m.item_mean(j);
  for (double r : a.value) {
    s.own_dev_i += (r - mi) * (r - mi);
    s.own_raw_i += r * r;
  }
  for (double r : b.value) {
    s.own_dev_j += (r - mj) * (r - mj);
    s.own_raw_j += r * r;
  }
  std::size_t p = 0, q = 0;
  while (p < a.size() && q < b.size()) {
    if (a.index[p] < b.index[q]) {
      ++p;
    } else if (b.index[q] < a.index[p]) {
      ++q;
    } else {
      const double x = a.value[p], y = b.value[q];
      const double dx = x - mi, dy = y - mj;
      ++s.common;
      s.dev_xy += dx * dy;
      s.dev_xx += dx * dx;
      s.dev_yy += dy * dy;
      s.raw_xy += x * y;
      s.raw_xx += x * x;
      s.raw_yy += y * y;
      ++p;
      ++q;
    }
  }
  return similarity_from_stats(measure, s);
}

// ---------------------------------------------------------------------------
// SimilarityMatrix

void select_top_k(std::vector<Neighbor> &c, int k) {
  const auto kk = static_cast<std::size_t>(std::max(k, 0));
  if (c.size() > kk) {
    std::nth_element(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(kk), c.end(),
                     neighbor_before);
    c.resize(kk);
  }
  std::sort(c.begin(), c.end(), neighbor_before);
}

SimilarityMatrix::SimilarityMatrix(std::shared_ptr<const IdMap> items, int k,
                                   std::string measure,
                                   std::vector<std::vector<Neighbor>> lists)
    : items_(std::move(items)), k_(k), measure_(std::move(measure)) {
  if (k < 1)
    throw UsageError("neighbourhood size must be at least 1");
  if (static_cast<Index>(lists.size()) != items_->size())
    throw UsageError("one neighbour list per item is required");
  offsets_.reserve(lists.size() + 1);
  for (Index i = 0; i < items_->size(); ++i) {
    auto &l = lists[i];
    std::erase_if(l, [i](const Neighbor &n) { return n.item == i; });
    select_top_k(l, k);
    entries_.insert(entries_.end(), l.begin(), l.end());
    offsets_.push_back(entries_.size());
  }
}

std::span<const Neighbor> SimilarityMatrix::neighbors(Index i) const {
  if (i < 0 || i >= n_items())
    return {};
  return std::span(entries_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

std::optional<double> SimilarityMatrix::weight(Index i, Index j) const {
  for (const Neighbor &n : neighbors(i))
    if (n.item == j)
      return n.weight;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Search

SimilarityMatrix knn_search(const RatingsMatrix &m, const KnnOptions &opt) {
  if (opt.k < 1)
    throw UsageError("K must be at least 1");
  if (m.empty())
    throw DataError("cannot search neighbours in an empty matrix");
  const Index n = m.n_items();
  const ItemTotals totals = item_totals(m);
  const bool dev = uses_deviations(opt.measure);

  // Per-log centred ratings aligned with the user-major storage.
  const auto &rows = m.by_user();
  std::vector<double> centred(static_cast<std::size_t>(rows.nonZeros()));
  for (Index k = 0; k < rows.nonZeros(); ++k) {
    const double r = rows.valuePtr()[k];
    centred[k] = dev ? r - totals.mean[rows.innerIndexPtr()[k]] : r;
  }

  std::vector<std::vector<Neighbor>> lists(static_cast<std::size_t>(n));
  const int workers = opt.workers > 0 ? opt.workers : default_workers();

#pragma omp parallel num_threads(workers)
  {
    std::vector<Index> common(static_cast<std::size_t>(n), 0);
    std::vector<double> xy(static_cast<std::size_t>(n), 0.0);
    std::vector<double> xx(static_cast<std::size_t>(n), 0.0);
    std::vector<double> yy(static_cast<std::size_t>(n), 0.0);
    std::vector<Index> touched;
    touched.reserve(static_cast<std::size_t>(n));

#pragma omp for schedule(dynamic, 8)
    for (Index i = 0; i < n; ++i) {
      const SparseView col = m.item_col(i);
      for (std::size_t p = 0; p < col.size(); ++p) {
        const Index u = col.index[p];
        const double x = dev ? col.value[p] - totals.mean[i] : col.value[p];
        const Index b = rows.outerIndexPtr()[u], e = rows.outerIndexPtr()[u + 1];
        for (Index q = b; q < e; ++q) {
          const Index j = rows.innerIndexPtr()[q];
          const double y = centred[q];
          if (common[j]++ == 0)
            touched.push_back(j);
          xy[j] += x * y;
          xx[j] += x * x;
          yy[j] += y * y;
        }
      }
      std::vector<Neighbor> cand;
      cand.reserve(touched.size());
      for (Index j : touched) {
        if (j != i) {
          PairStats s;
          s.common = common[j];
          s.count_i = static_cast<Index>(col.size());
          s.count_j = m.item_count(j);
          if (dev) {
            s.dev_xy = xy[j];
            s.dev_xx = xx[j];
            s.dev_yy = yy[j];
          } else {
            s.raw_xy = xy[j];
            s.raw_xx = xx[j];
            s.raw_yy = yy[j];
          }
          s.own_dev_i = totals.own_dev[i];
          s.own_dev_j = totals.own_dev[j];
          s.own_raw_i = totals.own_raw[i];
          s.own_raw_j = totals.own_raw[j];
          const double w = similarity_from_stats(opt.measure, s);
          if (w != 0.0)
            cand.push_back({j, w});
        }
        common[j] = 0;
        xy[j] = xx[j] = yy[j] = 0.0;
      }
      touched.clear();
      select_top_k(cand, opt.k);
      lists[i] = std::move(cand);
    }
  }
  SimilarityMatrix out(m.item_ids(), opt.k, std::string(to_string(opt.measure)),
                       std::move(lists));
  out.set_source_fingerprint(m.fingerprint());
  return out;
}

namespace {

bool same_universe(const IdMap &a, const IdMap &b) {
  if (&a == &b)
    return true;
  if (a.size() != b.size())
    return false;
  for (Index i = 0; i < a.size(); ++i)
    if (a.name(i) != b.name(i))
      return false;
  return true;
}

} // namespace

SimilarityMatrix merge_matrices(const SimilarityMatrix &a, const SimilarityMatrix &b,
                                double w, int k) {
  if (!(w >= 0.0 && w <= 1.0))
    throw UsageError("merge weight must lie in [0,1]");
  if (!same_universe(a.items(), b.items()))
    throw UsageError("merged similarity matrices must share their item universe");
  std::vector<std::vector<Neighbor>> lists(static_cast<std::size_t>(a.n_items()));
  for (Index i = 0; i < a.n_items(); ++i) {
    std::map<Index, double> acc;
    for (const Neighbor &nb : a.neighbors(i))
      acc[nb.item] += w * nb.weight;
    for (const Neighbor &nb : b.neighbors(i))
      acc[nb.item] += (1.0 - w) * nb.weight;
    for (auto [j, v] : acc)
      if (v != 0.0)
        lists[i].push_back({j, v});
  }
  Fingerprint f;
  f.update_pod(a.source_fingerprint());
  f.update_pod(b.source_fingerprint());
  f.update_pod(w);
  SimilarityMatrix out(a.item_ids(), k, "merge(" + a.measure() + "," + b.measure() + ")",
                       std::move(lists));
  out.set_source_fingerprint(f.value());
  return out;
}

SimilarityMatrix random_similarity_matrix(std::shared_ptr<const IdMap> items, int k,
                                          std::uint64_t seed) {
  if (k < 1)
    throw UsageError("K must be at least 1");
  const Index n = items->size();
  std::vector<std::vector<Neighbor>> lists(static_cast<std::size_t>(n));
  std::vector<Neighbor> cand;
  for (Index i = 0; i < n; ++i) {
    cand.clear();
    for (Index j = 0; j < n; ++j) {
      if (j == i)
        continue;
      double w = hash_uniform(seed, static_cast<std::uint64_t>(std::min(i, j)),
                              static_cast<std::uint64_t>(std::max(i, j)));
      if (w == 0.0)
        w = 0x1.0p-54;
      cand.push_back({j, w});
    }
    select_top_k(cand, k);
    lists[i] = cand;
  }
  SimilarityMatrix out(std::move(items), k, "random", std::move(lists));
  out.set_source_fingerprint(seed);
  return out;
}

// ---------------------------------------------------------------------------
// I/O

void write_similarity(std::ostream &out, const SimilarityMatrix &m) {
  out << "# reco-similarity v1 measure=" << m.measure() << " k=" << m.k()
      << " items=" << m.n_items() << " fingerprint=" << to_hex(m.source_fingerprint())
      << '\n';
  for (Index i = 0; i < m.n_items(); ++i)
    for (const Neighbor &nb : m.neighbors(i))
      out << m.items().name(i) << '\t' << m.items().name(nb.item) << '\t'
          << text::format_double(nb.weight) << '\n';
}

void save_similarity(const std::filesystem::path &path, const SimilarityMatrix &m) {
  std::ofstream out(path);
  if (!out)
    throw DataError("cannot write " + path.string());
  write_similarity(out, m);
}

SimilarityMatrix read_similarity(std::istream &in, std::shared_ptr<const IdMap> items,
                                 std::string_view source) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# reco-similarity v1", 0) != 0)
    throw DataError(std::string(source) + ": missing similarity header");
  const auto header = text::parse_header(line);
  auto get = [&](std::string_view key) -> const std::string & {
    auto it = header.find(key);
    if (it == header.end())
      throw DataError(std::string(source) + ": header lacks " + std::string(key));
    return it->second;
  };
  const auto k = text::parse_int(get("k"));
  if (!k || *k < 1)
    throw DataError(std::string(source) + ": bad k in header");
  const std::uint64_t fp = from_hex(get("fingerprint"));

  std::vector<std::vector<Neighbor>> lists(static_cast<std::size_t>(items->size()));
  std::size_t lineno = 1, skipped = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#')
      continue;
    const auto f = text::split(line, "\t");
    const auto w = f.size() == 3 ? text::parse_double(f[2]) : std::nullopt;
    if (!w)
      throw DataError(std::string(source) + ":" + std::to_string(lineno) +
                      ": expected i<TAB>j<TAB>weight");
    const auto i = items->find(f[0]), j = items->find(f[1]);
    if (!i || !j) {
      ++skipped;
      continue;
    }
    lists[*i].push_back({*j, *w});
  }
  if (skipped)
    warn(std::string(source) + ": skipped " + std::to_string(skipped) +
         " entries with items outside the id space");
  SimilarityMatrix m(std::move(items), static_cast<int>(*k), get("measure"), std::move(lists));
  m.set_source_fingerprint(fp);
  return m;
}

SimilarityMatrix load_similarity(const std::filesystem::path &path,
                                 std::shared_ptr<const IdMap> items) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open " + path.string());
  return read_similarity(in, std::move(items), path.string());
}

} // namespace reco
