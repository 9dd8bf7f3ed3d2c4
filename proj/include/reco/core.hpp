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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace reco {

/// Dense internal index of a user, item or descriptor.
using Index = std::int32_t;

/// Closed rating interval [lo, hi].
struct Scale {
  double lo = 1.0;
  double hi = 5.0;

  bool contains(double r) const { return r >= lo && r <= hi; }
  double clamp(double r) const { return std::clamp(r, lo, hi); }
  double midpoint() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

inline bool operator==(const Scale &a, const Scale &b) {
  return a.lo == b.lo && a.hi == b.hi;
}

/// Malformed or inconsistent input data.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration.
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An artifact was built from a different data set than the one supplied.
class FingerprintMismatch : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Which branch of the predictor produced a value.
enum class Origin { MainModel, DefaultPredictor };

/// Heavy/light user crossed with popular/unpopular item.
enum class Segment { HP, HU, LP, LU };

inline constexpr Segment kAllSegments[] = {Segment::HP, Segment::HU,
                                           Segment::LP, Segment::LU};

inline std::string_view to_string(Segment s) {
  switch (s) {
  case Segment::HP:
    return "HP";
  case Segment::HU:
    return "HU";
  case Segment::LP:
    return "LP";
  case Segment::LU:
    return "LU";
  }
  return "?";
}

inline bool heavy(Segment s) { return s == Segment::HP || s == Segment::HU; }
inline bool popular(Segment s) { return s == Segment::HP || s == Segment::LP; }

inline Segment make_segment(bool heavy_user, bool popular_item) {
  if (heavy_user)
    return popular_item ? Segment::HP : Segment::HU;
  return popular_item ? Segment::LP : Segment::LU;
}

/// Neumaier compensated sum. Order-insensitive enough for 1e8-term RMSE sums.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  void merge(const CompensatedSum &o) {
    add(o.sum_);
    add(o.comp_);
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// 64-bit FNV-1a, used for data and config fingerprints.
class Fingerprint {
public:
  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
  }
  template <typename T> void update_pod(const T &v) {
    update(std::string_view(reinterpret_cast<const char *>(&v), sizeof(T)));
  }
  std::uint64_t value() const { return h_; }
  std::string hex() const;

private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string to_hex(std::uint64_t v);
std::uint64_t from_hex(std::string_view s);

inline std::string Fingerprint::hex() const { return to_hex(h_); }

/// Number of worker threads used by parallel kernels when not given explicitly.
int default_workers();

} // namespace reco
