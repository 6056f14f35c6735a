// Copyright 2026 The phishcost Authors
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

#ifndef PHISHCOST_DATASET_H_
#define PHISHCOST_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phishcost/cost.h"
#include "phishcost/feature_schema.h"

namespace phishcost {

class Classifier;

enum class Label : std::int8_t { kPhishing = -1, kLegitimate = 1 };

// Feature rows (row-major), labels and the original row id of each row.
// Subsets and projections keep ids so instances can be tracked across
// splits and feature restrictions.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  LabeledDataset(std::shared_ptr<const FeatureSchema> schema,
                 std::vector<FeatureValue> values, std::vector<Label> labels,
                 std::vector<std::size_t> ids = {});

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  std::size_t dim() const { return schema_ ? schema_->size() : 0; }
  const FeatureSchema& schema() const { return *schema_; }
  const std::shared_ptr<const FeatureSchema>& schema_ptr() const {
    return schema_;
  }

  std::span<const FeatureValue> row(std::size_t i) const {
    return {values_.data() + i * dim(), dim()};
  }
  Label label(std::size_t i) const { return labels_[i]; }
  std::size_t id(std::size_t i) const { return ids_[i]; }
  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<std::size_t>& ids() const { return ids_; }
  FeatureVector instance(std::size_t i) const;

  std::size_t CountLabel(Label label) const;
  // Position of the row with the given id; throws kConfigError if absent.
  std::size_t PositionOf(std::size_t id) const;

  LabeledDataset Subset(std::span<const std::size_t> positions) const;
  // Same rows restricted to cfg.members (in cfg order).
  LabeledDataset Project(const FeatureSetConfig& cfg) const;
  // Same rows under a schema with equal names and admissible sets (used to
  // swap group metadata).
  LabeledDataset WithSchema(std::shared_ptr<const FeatureSchema> schema) const;

 private:
  std::shared_ptr<const FeatureSchema> schema_;
  std::vector<FeatureValue> values_;
  std::vector<Label> labels_;
  std::vector<std::size_t> ids_;
};

struct LoadOptions {
  std::string label_column = "Result";
  // Strict: any value outside {-1, 0, +1} is a ParseError. Lenient: rows
  // holding such values are dropped and counted.
  bool strict = true;
  // Group assignment by feature name; unnamed features default to surface.
  std::map<std::string, FeatureGroup> groups = DefaultGroupMap();
};

struct LoadedData {
  LabeledDataset dataset;
  std::size_t dropped_rows = 0;
};

// CSV with a header row. Admissible sets are the values observed per column.
LoadedData LoadCsv(const std::string& path, const LoadOptions& options = {});
LoadedData ParseCsv(std::string_view text, const LoadOptions& options = {});
// UCI ARFF; admissible sets come from the nominal attribute declarations.
LoadedData LoadArff(const std::string& path, const LoadOptions& options = {});
LoadedData ParseArff(std::string_view text, const LoadOptions& options = {});
// Dispatches on the ".arff" extension, CSV otherwise.
LoadedData LoadDataset(const std::string& path,
                       const LoadOptions& options = {});

struct SplitSpec {
  Rational test_fraction{1, 4};
  std::uint64_t seed = 1337;
  bool stratified = true;
};

struct DataSplit {
  SplitSpec spec;
  // Positions into the source dataset, ascending.
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  LabeledDataset train;
  LabeledDataset test;
};

// Test size is ceil(n * test_fraction). Per-class quotas are the floors of
// class_size * test_fraction, topped up one at a time by largest remainder
// (ties to the phishing class) until the total is met. Each class is
// shuffled with Fisher-Yates under Rng(spec.seed), phishing class first, and
// the first quota positions go to test.
DataSplit StratifiedSplit(const LabeledDataset& dataset, const SplitSpec& spec);

std::string SplitManifestJson(const DataSplit& split,
                              std::string_view dataset_hash);

// Stable digest of schema, values and labels.
std::string DatasetHash(const LabeledDataset& dataset);

// Phishing-labelled test rows that the model classifies as phishing.
struct ConditioningSet {
  std::string model;
  // Row ids, ascending.
  std::vector<std::size_t> ids;
};

ConditioningSet BuildConditioningSet(const Classifier& model,
                                     std::string model_name,
                                     const LabeledDataset& test);

// Uniform sample without replacement of size n from the intersection of
// all sets; ids ascending. Throws kInsufficientIntersection carrying the
// intersection size.
std::vector<std::size_t> IntersectionSample(
    std::span<const ConditioningSet> sets, std::size_t n, std::uint64_t seed);

std::vector<std::size_t> Intersect(std::span<const ConditioningSet> sets);

}  // namespace phishcost

#endif  // PHISHCOST_DATASET_H_
