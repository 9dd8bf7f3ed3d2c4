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
#include "reco/core.hpp"
#include "reco/log.hpp"

#include <charconv>
#include <iostream>
#include <mutex>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace reco {

std::string to_hex(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4)
    s[i] = digits[v & 0xf];
  return s;
}

std::uint64_t from_hex(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw DataError("bad fingerprint: " + std::string(s));
  return v;
}

int default_workers() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return std::max(1u, std::thread::hardware_concurrency());
#endif
}

namespace {

std::mutex sink_mutex;

WarningSink &sink() {
  static WarningSink s = [](std::string_view m) {
    std::cerr << "warning: " << m << '\n';
  };
  return s;
}

} // namespace

WarningSink set_warning_sink(WarningSink s) {
  std::lock_guard lock(sink_mutex);
  std::swap(sink(), s);
  return s;
}

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex);
  if (sink())
    sink()(message);
}

} // namespace reco
