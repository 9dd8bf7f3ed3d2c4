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
#include "reco/ratings.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <numeric>
#include <sstream>

#include "reco/random.hpp"
#include "text.hpp"

namespace reco {

namespace {

bool is_integer(std::string_view s) {
  if (s.empty())
    return false;
  std::size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size() || s.size() - i > 18)
    return false;
  return std::all_of(s.begin() + i, s.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

std::int64_t to_integer(std::string_view s) {
  std::int64_t v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

template <typename T> bool parse_number(std::string_view s, T &out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

} // namespace

std::optional<Timestamp> parse_iso8601(std::string_view s) {
  using namespace std::chrono;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-')
    return std::nullopt;
  int y = 0;
  unsigned mo = 0, d = 0;
  if (!parse_number(s.substr(0, 4), y) || !parse_number(s.substr(5, 2), mo) ||
      !parse_number(s.substr(8, 2), d))
    return std::nullopt;
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok())
    return std::nullopt;
  Timestamp t = sys_days{ymd}.time_since_epoch().count() * Timestamp{86400};
  std::string_view rest = s.substr(10);
  if (rest.empty())
    return t;
  if (rest.back() == 'Z')
    rest.remove_suffix(1);
  if (rest.size() != 9 || (rest[0] != 'T' && rest[0] != ' ') || rest[3] != ':' ||
      rest[6] != ':')
    return std::nullopt;
  int hh = 0, mm = 0, ss = 0;
  if (!parse_number(rest.substr(1, 2), hh) || !parse_number(rest.substr(4, 2), mm) ||
      !parse_number(rest.substr(7, 2), ss) || hh > 23 || mm > 59 || ss > 60)
    return std::nullopt;
  return t + hh * 3600 + mm * 60 + ss;
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  if (t == kNoDate)
    return {};
  const auto days = static_cast<std::int64_t>(std::floor(static_cast<double>(t) / 86400.0));
  const Timestamp secs = t - days * 86400;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  if (secs == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
                  int(secs / 3600), int(secs / 60 % 60), int(secs % 60));
  }
  return buf;
}

// ---------------------------------------------------------------------------
// IdMap

IdMap IdMap::from_ids(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (std::all_of(ids.begin(), ids.end(), is_integer)) {
    std::stable_sort(ids.begin(), ids.end(), [](const auto &a, const auto &b) {
      return to_integer(a) < to_integer(b);
    });
  }
  IdMap map;
  map.names_ = std::move(ids);
  map.lookup_.reserve(map.names_.size());
  for (Index i = 0; i < map.size(); ++i)
    map.lookup_.emplace(map.names_[i], i);
  return map;
}

std::optional<Index> IdMap::find(std::string_view id) const {
  auto it = lookup_.find(std::string(id));
  if (it == lookup_.end())
    return std::nullopt;
  return it->second;
}

Index IdMap::at(std::string_view id) const {
  if (auto i = find(id))
    return *i;
  throw DataError("unknown id '" + std::string(id) + "'");
}

std::optional<double> SparseView::find(Index j) const {
  auto it = std::lower_bound(index.begin(), index.end(), j);
  if (it == index.end() || *it != j)
    return std::nullopt;
  return value[static_cast<std::size_t>(it - index.begin())];
}

// ---------------------------------------------------------------------------
// RatingsMatrix

RatingsMatrix::RatingsMatrix(std::shared_ptr<const IdMap> users,
                             std::shared_ptr<const IdMap> items, Scale scale,
                             std::vector<Entry> entries)
    : users_(std::move(users)), items_(std::move(items)), scale_(scale) {
  if (!users_ || !items_)
    throw UsageError("RatingsMatrix needs user and item id maps");
  std::sort(entries.begin(), entries.end(), [](const Entry &a, const Entry &b) {
    return a.user != b.user ? a.user < b.user : a.item < b.item;
  });
  const Index nu = users_->size(), ni = items_->size();
  std::vector<Eigen::Triplet<double, Index>> triplets;
  triplets.reserve(entries.size());
  dates_.reserve(entries.size());
  user_sum_.assign(static_cast<std::size_t>(nu), 0.0);
  item_sum_.assign(static_cast<std::size_t>(ni), 0.0);
  CompensatedSum total;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Entry &e = entries[k];
    if (e.user < 0 || e.user >= nu || e.item < 0 || e.item >= ni)
      throw DataError("entry index outside the id space");
    if (k > 0 && entries[k - 1].user == e.user && entries[k - 1].item == e.item)
      throw DataError("duplicate log for user '" + users_->name(e.user) +
                      "' and item '" + items_->name(e.item) + "'");
    if (!scale_.contains(e.rating))
      throw DataError("rating " + text::format_double(e.rating) + " of user '" +
                      users_->name(e.user) + "' for item '" +
                      items_->name(e.item) + "' is outside the scale [" +
                      text::format_double(scale_.lo) + "," +
                      text::format_double(scale_.hi) + "]");
    triplets.emplace_back(e.user, e.item, e.rating);
    dates_.push_back(e.date);
    user_sum_[e.user] += e.rating;
    item_sum_[e.item] += e.rating;
    total.add(e.rating);
  }
  by_user_.resize(nu, ni);
  by_user_.setFromTriplets(triplets.begin(), triplets.end());
  by_user_.makeCompressed();
  by_item_ = by_user_;
  by_item_.makeCompressed();
  global_mean_ = entries.empty() ? scale_.midpoint()
                                 : total.value() / static_cast<double>(entries.size());
  for (Index u = 0; u < nu; ++u)
    active_users_ += user_count(u) > 0;
  for (Index i = 0; i < ni; ++i)
    active_items_ += item_count(i) > 0;
}

SparseView RatingsMatrix::user_row(Index u) const {
  if (u < 0 || u >= n_users())
    throw std::out_of_range("user index out of range");
  const Index b = by_user_.outerIndexPtr()[u], e = by_user_.outerIndexPtr()[u + 1];
  return {{by_user_.innerIndexPtr() + b, static_cast<std::size_t>(e - b)},
          {by_user_.valuePtr() + b, static_cast<std::size_t>(e - b)}};
}

SparseView RatingsMatrix::item_col(Index i) const {
  if (i < 0 || i >= n_items())
    throw std::out_of_range("item index out of range");
  const Index b = by_item_.outerIndexPtr()[i], e = by_item_.outerIndexPtr()[i + 1];
  return {{by_item_.innerIndexPtr() + b, static_cast<std::size_t>(e - b)},
          {by_item_.valuePtr() + b, static_cast<std::size_t>(e - b)}};
}

std::span<const Timestamp> RatingsMatrix::user_dates(Index u) const {
  if (u < 0 || u >= n_users())
    throw std::out_of_range("user index out of range");
  const Index b = by_user_.outerIndexPtr()[u], e = by_user_.outerIndexPtr()[u + 1];
  return {dates_.data() + b, static_cast<std::size_t>(e - b)};
}

std::optional<double> RatingsMatrix::rating(Index u, Index i) const {
  return user_row(u).find(i);
}

Index RatingsMatrix::user_count(Index u) const {
  if (u < 0 || u >= n_users())
    throw std::out_of_range("user index out of range");
  return by_user_.outerIndexPtr()[u + 1] - by_user_.outerIndexPtr()[u];
}

Index RatingsMatrix::item_count(Index i) const {
  if (i < 0 || i >= n_items())
    throw std::out_of_range("item index out of range");
  return by_item_.outerIndexPtr()[i + 1] - by_item_.outerIndexPtr()[i];
}

std::optional<double> RatingsMatrix::user_mean(Index u) const {
  const Index n = user_count(u);
  if (n == 0)
    return std::nullopt;
  return user_sum_[u] / n;
}

std::optional<double> RatingsMatrix::item_mean(Index i) const {
  const Index n = item_count(i);
  if (n == 0)
    return std::nullopt;
  return item_sum_[i] / n;
}

std::optional<double> RatingsMatrix::robust_item_mean(Index i, Index min_support) const {
  const Index n = item_count(i);
  if (n == 0 || n < min_support)
    return std::nullopt;
  return item_sum_[i] / n;
}

std::vector<Entry> RatingsMatrix::entries() const {
  std::vector<Entry> out;
  out.reserve(size());
  for (Index u = 0; u < n_users(); ++u) {
    const SparseView row = user_row(u);
    const auto dates = user_dates(u);
    for (std::size_t k = 0; k < row.size(); ++k)
      out.push_back({u, row.index[k], row.value[k], dates[k]});
  }
  return out;
}

std::uint64_t RatingsMatrix::fingerprint() const {
  // Order-independent combination of per-log hashes, so the value does not
  // depend on the index space.
  std::uint64_t acc = 0;
  for (Index u = 0; u < n_users(); ++u) {
    const SparseView row = user_row(u);
    if (row.empty())
      continue;
    Fingerprint uh;
    uh.update(users_->name(u));
    uh.update(std::string_view("\0", 1));
    const auto dates = user_dates(u);
    for (std::size_t k = 0; k < row.size(); ++k) {
      Fingerprint h = uh;
      h.update(items_->name(row.index[k]));
      h.update_pod(row.value[k]);
      h.update_pod(dates[k]);
      std::uint64_t z = h.value() + 0x9e3779b97f4a7c15ULL;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      acc += z ^ (z >> 31);
    }
  }
  Fingerprint f;
  f.update_pod(acc);
  f.update_pod(static_cast<std::uint64_t>(size()));
  f.update_pod(scale_.lo);
  f.update_pod(scale_.hi);
  return f.value();
}

// ---------------------------------------------------------------------------
// Loading

std::vector<RatingLog> parse_logs(std::istream &in, LogFormat format,
                                  std::string_view source) {
  std::vector<RatingLog> logs;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string &what) {
    throw DataError(std::string(source) + ":" + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line[0] == '#')
      continue;
    const auto fields = format == LogFormat::MovieLens ? text::split(line, "::")
                                                       : text::split(line, "\t");
    if (fields.size() < 3 || fields.size() > 4)
      fail("expected user, item, rating[, date] but found " +
           std::to_string(fields.size()) + " fields");
    RatingLog log{std::string(fields[0]), std::string(fields[1]), 0.0, kNoDate};
    if (log.user.empty() || log.item.empty())
      fail("empty user or item id");
    if (!parse_number(fields[2], log.rating) || !std::isfinite(log.rating))
      fail("cannot parse rating '" + std::string(fields[2]) + "'");
    if (fields.size() == 4 && !fields[3].empty()) {
      if (format == LogFormat::MovieLens) {
        std::int64_t secs = 0;
        if (!parse_number(fields[3], secs))
          fail("cannot parse timestamp '" + std::string(fields[3]) + "'");
        log.date = secs;
      } else {
        auto t = parse_iso8601(fields[3]);
        if (!t)
          fail("cannot parse date '" + std::string(fields[3]) + "'");
        log.date = *t;
      }
    }
    logs.push_back(std::move(log));
  }
  return logs;
}

RatingsMatrix build_matrix(std::span<const RatingLog> logs, Scale scale,
                           std::shared_ptr<const IdMap> users,
                           std::shared_ptr<const IdMap> items) {
  if (logs.empty())
    throw DataError("no rating logs");
  for (const RatingLog &l : logs)
    if (!scale.contains(l.rating))
      throw DataError("rating " + text::format_double(l.rating) + " of record (" +
                      l.user + ", " + l.item + ") is outside the scale [" +
                      text::format_double(scale.lo) + "," +
                      text::format_double(scale.hi) + "]");
  if (!users) {
    std::vector<std::string> ids;
    ids.reserve(logs.size());
    for (const auto &l : logs)
      ids.push_back(l.user);
    users = std::make_shared<const IdMap>(IdMap::from_ids(std::move(ids)));
  }
  if (!items) {
    std::vector<std::string> ids;
    ids.reserve(logs.size());
    for (const auto &l : logs)
      ids.push_back(l.item);
    items = std::make_shared<const IdMap>(IdMap::from_ids(std::move(ids)));
  }
  struct Keyed {
    Entry e;
    std::size_t pos;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(logs.size());
  for (std::size_t k = 0; k < logs.size(); ++k) {
    const auto &l = logs[k];
    keyed.push_back({{users->at(l.user), items->at(l.item), l.rating, l.date}, k});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed &a, const Keyed &b) {
    if (a.e.user != b.e.user)
      return a.e.user < b.e.user;
    if (a.e.item != b.e.item)
      return a.e.item < b.e.item;
    if (a.e.date != b.e.date)
      return a.e.date < b.e.date;
    return a.pos < b.pos;
  });
  std::vector<Entry> entries;
  entries.reserve(keyed.size());
  for (std::size_t k = 0; k < keyed.size(); ++k) {
    const bool last_of_group = k + 1 == keyed.size() ||
                               keyed[k + 1].e.user != keyed[k].e.user ||
                               keyed[k + 1].e.item != keyed[k].e.item;
    if (last_of_group)
      entries.push_back(keyed[k].e);
  }
  return RatingsMatrix(std::move(users), std::move(items), scale, std::move(entries));
}

namespace {

std::vector<RatingLog> read_log_file(const std::filesystem::path &path, LogFormat format) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open " + path.string());
  auto logs = parse_logs(in, format, path.string());
  if (logs.empty())
    throw DataError(path.string() + ": no rating logs");
  return logs;
}

} // namespace

RatingsMatrix load_logs(const std::filesystem::path &path, Scale scale, LogFormat format) {
  const auto logs = read_log_file(path, format);
  return build_matrix(logs, scale);
}

std::pair<RatingsMatrix, RatingsMatrix> load_split(const std::filesystem::path &train,
                                                   const std::filesystem::path &test,
                                                   Scale scale, LogFormat format) {
  const auto a = read_log_file(train, format);
  const auto b = read_log_file(test, format);
  std::vector<std::string> users, items;
  for (const auto *v : {&a, &b})
    for (const auto &l : *v) {
      users.push_back(l.user);
      items.push_back(l.item);
    }
  auto um = std::make_shared<const IdMap>(IdMap::from_ids(std::move(users)));
  auto im = std::make_shared<const IdMap>(IdMap::from_ids(std::move(items)));
  return {build_matrix(a, scale, um, im), build_matrix(b, scale, um, im)};
}

void write_logs(std::ostream &out, const RatingsMatrix &m) {
  out << "# fingerprint=" << to_hex(m.fingerprint()) << " logs=" << m.size()
      << " scale=" << text::format_double(m.scale().lo) << ","
      << text::format_double(m.scale().hi) << '\n';
  for (Index u = 0; u < m.n_users(); ++u) {
    const SparseView row = m.user_row(u);
    const auto dates = m.user_dates(u);
    for (std::size_t k = 0; k < row.size(); ++k) {
      out << m.users().name(u) << '\t' << m.items().name(row.index[k]) << '\t'
          << text::format_double(row.value[k]);
      if (dates[k] != kNoDate)
        out << '\t' << format_iso8601(dates[k]);
      out << '\n';
    }
  }
}

void save_logs(const std::filesystem::path &path, const RatingsMatrix &m) {
  std::ofstream out(path);
  if (!out)
    throw DataError("cannot write " + path.string());
  write_logs(out, m);
}

RatingsMatrix reindex(const RatingsMatrix &m, std::shared_ptr<const IdMap> users,
                      std::shared_ptr<const IdMap> items) {
  std::vector<Entry> out;
  out.reserve(m.size());
  for (const Entry &e : m.entries())
    out.push_back({users->at(m.users().name(e.user)), items->at(m.items().name(e.item)),
                   e.rating, e.date});
  return RatingsMatrix(std::move(users), std::move(items), m.scale(), std::move(out));
}

// ---------------------------------------------------------------------------
// Splits

namespace {

Split assemble(const RatingsMatrix &m, const std::vector<Entry> &all,
               const std::vector<char> &is_test) {
  std::vector<Entry> train, test;
  for (std::size_t k = 0; k < all.size(); ++k)
    (is_test[k] ? test : train).push_back(all[k]);
  return {RatingsMatrix(m.user_ids(), m.item_ids(), m.scale(), std::move(train)),
          RatingsMatrix(m.user_ids(), m.item_ids(), m.scale(), std::move(test))};
}

} // namespace

Split split_train_test(const RatingsMatrix &m, double test_fraction, std::uint64_t seed,
                       SplitMode mode) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw UsageError("test fraction must lie in (0,1)");
  const std::vector<Entry> all = m.entries();
  std::vector<char> is_test(all.size(), 0);
  Rng rng(seed);
  if (mode == SplitMode::Global) {
    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span(order));
    const auto t = static_cast<std::size_t>(
        std::lround(static_cast<double>(all.size()) * test_fraction));
    for (std::size_t k = 0; k < t; ++k)
      is_test[order[k]] = 1;
    return assemble(m, all, is_test);
  }
  std::size_t begin = 0;
  std::vector<std::size_t> order;
  for (Index u = 0; u < m.n_users(); ++u) {
    const auto n = static_cast<std::size_t>(m.user_count(u));
    if (n == 0)
      continue;
    auto t = static_cast<std::size_t>(std::lround(static_cast<double>(n) * test_fraction));
    t = std::min(t, n >= 2 ? n - 1 : n);
    order.resize(n);
    std::iota(order.begin(), order.end(), begin);
    rng.shuffle(std::span(order));
    for (std::size_t k = 0; k < t; ++k)
      is_test[order[k]] = 1;
    begin += n;
  }
  return assemble(m, all, is_test);
}

std::vector<Split> kfold(const RatingsMatrix &m, int k, std::uint64_t seed) {
  if (k < 2)
    throw UsageError("k-fold needs k >= 2");
  const std::vector<Entry> all = m.entries();
  std::vector<int> fold(all.size(), 0);
  Rng rng(seed);
  std::size_t begin = 0;
  std::vector<std::size_t> order;
  for (Index u = 0; u < m.n_users(); ++u) {
    const auto n = static_cast<std::size_t>(m.user_count(u));
    if (n == 0)
      continue;
    order.resize(n);
    std::iota(order.begin(), order.end(), begin);
    rng.shuffle(std::span(order));
    const auto offset = rng.below(static_cast<std::uint64_t>(k));
    for (std::size_t p = 0; p < n; ++p)
      fold[order[p]] = static_cast<int>((p + offset) % static_cast<std::size_t>(k));
    begin += n;
  }
  std::vector<Split> out;
  for (int f = 0; f < k; ++f) {
    std::vector<char> is_test(all.size());
    for (std::size_t j = 0; j < all.size(); ++j)
      is_test[j] = fold[j] == f;
    out.push_back(assemble(m, all, is_test));
  }
  return out;
}

RatingsMatrix transpose(const RatingsMatrix &m) {
  std::vector<Entry> out = m.entries();
  for (Entry &e : out)
    std::swap(e.user, e.item);
  return RatingsMatrix(m.item_ids(), m.user_ids(), m.scale(), std::move(out));
}

RatingsMatrix restrict_users(const RatingsMatrix &m, std::span<const Index> users) {
  std::vector<char> keep(static_cast<std::size_t>(m.n_users()), 0);
  for (Index u : users)
    keep.at(static_cast<std::size_t>(u)) = 1;
  std::vector<Entry> out;
  for (const Entry &e : m.entries())
    if (keep[e.user])
      out.push_back(e);
  return RatingsMatrix(m.user_ids(), m.item_ids(), m.scale(), std::move(out));
}

LogStats describe(const RatingsMatrix &m) {
  LogStats s;
  s.logs = m.size();
  s.users = m.active_users();
  s.items = m.active_items();
  const double cells = static_cast<double>(s.users) * static_cast<double>(s.items);
  s.sparsity = cells > 0 ? 1.0 - static_cast<double>(s.logs) / cells : 1.0;
  s.global_mean = m.global_mean();
  s.ratings_per_user = s.users ? static_cast<double>(s.logs) / s.users : 0.0;
  s.ratings_per_item = s.items ? static_cast<double>(s.logs) / s.items : 0.0;
  return s;
}

} // namespace reco
