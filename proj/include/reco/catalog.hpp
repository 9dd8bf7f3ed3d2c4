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

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reco/ratings.hpp"

namespace reco {

/// One (item, attribute, value, weight) line of a catalog file.
struct DescriptorRecord {
  std::string item;
  std::string attribute;
  std::string value;
  double weight = 1.0;
};

/// Item metadata as weighted Boolean descriptors, a descriptor being one
/// (attribute, value) pair.
class DescriptorCatalog {
public:
  struct Tag {
    Index descriptor;
    double weight;
  };

  DescriptorCatalog() = default;
  /// Weights must lie in [0,1]. Duplicate (item, descriptor) pairs keep the
  /// largest weight and emit a warning.
  static DescriptorCatalog from_records(std::span<const DescriptorRecord> records);

  const IdMap &items() const { return *items_; }
  const IdMap &descriptors() const { return *descriptors_; }
  const IdMap &attributes() const { return *attributes_; }
  std::size_t size() const { return tags_.size(); }

  Index attribute_of(Index descriptor) const { return attribute_of_.at(descriptor); }
  std::optional<Index> descriptor(std::string_view attribute, std::string_view value) const;
  std::span<const Tag> descriptors_of(Index item) const;

  /// Descriptor-by-item matrix over an external item id space, with the
  /// descriptor weight as the rating on the scale [0,1]. Columns of items
  /// without metadata are empty; catalog items outside the space are dropped.
  RatingsMatrix as_matrix(std::shared_ptr<const IdMap> item_space) const;

  static std::string descriptor_key(std::string_view attribute, std::string_view value);

private:
  std::shared_ptr<const IdMap> items_ = std::make_shared<IdMap>();
  std::shared_ptr<const IdMap> descriptors_ = std::make_shared<IdMap>();
  std::shared_ptr<const IdMap> attributes_ = std::make_shared<IdMap>();
  std::vector<Index> attribute_of_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Tag> tags_;
};

enum class CatalogFormat { Tsv, MovieLens };

DescriptorCatalog parse_catalog(std::istream &in, CatalogFormat format = CatalogFormat::Tsv,
                                std::string_view source = "<stream>");
DescriptorCatalog load_catalog(const std::filesystem::path &path,
                               CatalogFormat format = CatalogFormat::Tsv);
void write_catalog(std::ostream &out, const DescriptorCatalog &c);

/// Expert-set weight per attribute. Unlisted attributes weigh 1.
class AttributeDictionary {
public:
  void set(std::string attribute, double weight);
  double weight(std::string_view attribute) const;

  static AttributeDictionary load(const std::filesystem::path &path);

private:
  std::map<std::string, double, std::less<>> weights_;
};

} // namespace reco
