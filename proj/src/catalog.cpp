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
#include "reco/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "reco/log.hpp"
#include "text.hpp"

namespace reco {

std::string DescriptorCatalog::descriptor_key(std::string_view attribute,
                                              std::string_view value) {
  std::string key(attribute);
  key += '\t';
  key += value;
  return key;
}

DescriptorCatalog DescriptorCatalog::from_records(std::span<const DescriptorRecord> records) {
  std::vector<std::string> items, descs, attrs;
  for (const auto &r : records) {
    if (!(r.weight >= 0.0 && r.weight <= 1.0))
      throw DataError("descriptor weight " + text::format_double(r.weight) + " for item '" +
                      r.item + "' (" + r.attribute + "=" + r.value + ") is outside [0,1]");
    items.push_back(r.item);
    descs.push_back(descriptor_key(r.attribute, r.value));
    attrs.push_back(r.attribute);
  }
  DescriptorCatalog c;
  auto item_map = std::make_shared<IdMap>(IdMap::from_ids(std::move(items)));
  auto desc_map = std::make_shared<IdMap>(IdMap::from_ids(std::move(descs)));
  auto attr_map = std::make_shared<IdMap>(IdMap::from_ids(std::move(attrs)));

  struct Raw {
    Index item, desc;
    double weight;
  };
  std::vector<Raw> raw;
  raw.reserve(records.size());
  c.attribute_of_.assign(static_cast<std::size_t>(desc_map->size()), 0);
  for (const auto &r : records) {
    const Index d = desc_map->at(descriptor_key(r.attribute, r.value));
    c.attribute_of_[d] = attr_map->at(r.attribute);
    raw.push_back({item_map->at(r.item), d, r.weight});
  }
  std::sort(raw.begin(), raw.end(), [](const Raw &a, const Raw &b) {
    return a.item != b.item ? a.item < b.item : a.desc < b.desc;
  });
  c.offsets_.assign(static_cast<std::size_t>(item_map->size()) + 1, 0);
  for (std::size_t k = 0; k < raw.size(); ++k) {
    if (k > 0 && raw[k].item == raw[k - 1].item && raw[k].desc == raw[k - 1].desc) {
      warn("duplicate descriptor '" + desc_map->name(raw[k].desc) + "' for item '" +
           item_map->name(raw[k].item) + "', keeping the largest weight");
      c.tags_.back().weight = std::max(c.tags_.back().weight, raw[k].weight);
      continue;
    }
    c.tags_.push_back({raw[k].desc, raw[k].weight});
    c.offsets_[raw[k].item + 1] = c.tags_.size();
  }
  for (std::size_t i = 1; i < c.offsets_.size(); ++i)
    c.offsets_[i] = std::max(c.offsets_[i], c.offsets_[i - 1]);
  c.items_ = std::move(item_map);
  c.descriptors_ = std::move(desc_map);
  c.attributes_ = std::move(attr_map);
  return c;
}

std::optional<Index> DescriptorCatalog::descriptor(std::string_view attribute,
                                                   std::string_view value) const {
  return descriptors_->find(descriptor_key(attribute, value));
}

std::span<const DescriptorCatalog::Tag> DescriptorCatalog::descriptors_of(Index item) const {
  if (item < 0 || item >= items_->size())
    return {};
  return std::span(tags_).subspan(offsets_[item], offsets_[item + 1] - offsets_[item]);
}

RatingsMatrix DescriptorCatalog::as_matrix(std::shared_ptr<const IdMap> item_space) const {
  std::vector<Entry> entries;
  entries.reserve(tags_.size());
  for (Index i = 0; i < items_->size(); ++i) {
    const auto target = item_space->find(items_->name(i));
    if (!target)
      continue;
    for (const Tag &t : descriptors_of(i))
      entries.push_back({t.descriptor, *target, t.weight, kNoDate});
  }
  return RatingsMatrix(descriptors_, std::move(item_space), Scale{0.0, 1.0},
                       std::move(entries));
}

namespace {

// "Toy Story (1995)" -> "1995"
std::optional<std::string> title_year(std::string_view title) {
  title = text::trim(title);
  if (title.size() >= 6 && title.back() == ')' && title[title.size() - 6] == '(') {
    auto y = title.substr(title.size() - 5, 4);
    if (text::parse_int(y))
      return std::string(y);
  }
  return std::nullopt;
}

} // namespace

DescriptorCatalog parse_catalog(std::istream &in, CatalogFormat format,
                                std::string_view source) {
  std::vector<DescriptorRecord> records;
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
    if (format == CatalogFormat::MovieLens) {
      const auto f = text::split(line, "::");
      if (f.size() != 3)
        fail("expected id::title::genres");
      const std::string item(f[0]);
      for (auto g : text::split(f[2], "|"))
        if (!g.empty())
          records.push_back({item, "genre", std::string(g), 1.0});
      if (auto y = title_year(f[1])) {
        records.push_back({item, "year", *y, 1.0});
        records.push_back({item, "decade", y->substr(0, 3) + "0s", 1.0});
      }
      continue;
    }
    const auto f = text::split(line, "\t");
    if (f.size() < 3 || f.size() > 4)
      fail("expected item, attribute, value[, weight]");
    DescriptorRecord r{std::string(f[0]), std::string(f[1]), std::string(f[2]), 1.0};
    if (f.size() == 4 && !f[3].empty()) {
      auto w = text::parse_double(f[3]);
      if (!w)
        fail("cannot parse weight '" + std::string(f[3]) + "'");
      r.weight = *w;
    }
    if (!(r.weight >= 0.0 && r.weight <= 1.0))
      fail("weight " + std::string(f[3]) + " is outside [0,1]");
    records.push_back(std::move(r));
  }
  if (records.empty())
    throw DataError(std::string(source) + ": no catalog records");
  return DescriptorCatalog::from_records(records);
}

DescriptorCatalog load_catalog(const std::filesystem::path &path, CatalogFormat format) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open " + path.string());
  return parse_catalog(in, format, path.string());
}

void write_catalog(std::ostream &out, const DescriptorCatalog &c) {
  for (Index i = 0; i < c.items().size(); ++i)
    for (const auto &t : c.descriptors_of(i)) {
      const std::string &key = c.descriptors().name(t.descriptor);
      const auto tab = key.find('\t');
      out << c.items().name(i) << '\t' << key.substr(0, tab) << '\t' << key.substr(tab + 1)
          << '\t' << text::format_double(t.weight) << '\n';
    }
}

void AttributeDictionary::set(std::string attribute, double weight) {
  if (!(weight >= 0.0))
    throw DataError("attribute weight must be non-negative: " + attribute);
  weights_[std::move(attribute)] = weight;
}

double AttributeDictionary::weight(std::string_view attribute) const {
  auto it = weights_.find(attribute);
  return it == weights_.end() ? 1.0 : it->second;
}

AttributeDictionary AttributeDictionary::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open " + path.string());
  AttributeDictionary d;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = text::trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    const auto f = text::split(t, "\t");
    auto w = f.size() == 2 ? text::parse_double(f[1]) : std::nullopt;
    if (!w)
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": expected attribute<TAB>weight");
    d.set(std::string(f[0]), *w);
  }
  return d;
}

} // namespace reco
