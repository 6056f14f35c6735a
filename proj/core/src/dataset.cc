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

#include "phishcost/dataset.h"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <utility>

#include <nlohmann/json.hpp>

#include "internal.h"
#include "phishcost/error.h"
#include "phishcost/model.h"
#include "phishcost/random.h"

namespace phishcost {

using internal::Split;
using internal::Trim;

LabeledDataset::LabeledDataset(std::shared_ptr<const FeatureSchema> schema,
                               std::vector<FeatureValue> values,
                               std::vector<Label> labels,
                               std::vector<std::size_t> ids)
    : schema_(std::move(schema)),
      values_(std::move(values)),
      labels_(std::move(labels)),
      ids_(std::move(ids)) {
  if (values_.size() != labels_.size() * schema_->size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "value buffer does not match rows x schema dimension");
  }
  if (ids_.empty()) {
    ids_.resize(labels_.size());
    std::iota(ids_.begin(), ids_.end(), std::size_t{0});
  } else if (ids_.size() != labels_.size()) {
    throw Error(ErrorCode::kLengthMismatch, "ids do not match row count");
  }
}

FeatureVector LabeledDataset::instance(std::size_t i) const {
  auto r = row(i);
  return FeatureVector(schema_, std::vector<FeatureValue>(r.begin(), r.end()));
}

std::size_t LabeledDataset::CountLabel(Label label) const {
  return static_cast<std::size_t>(
      std::count(labels_.begin(), labels_.end(), label));
}

std::size_t LabeledDataset::PositionOf(std::size_t id) const {
  // ids are ascending for every dataset built by this library.
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it != ids_.end() && *it == id) {
    return static_cast<std::size_t>(it - ids_.begin());
  }
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == id) return i;
  }
  throw Error(ErrorCode::kConfigError,
              "row id " + std::to_string(id) + " not in dataset");
}

LabeledDataset LabeledDataset::Subset(
    std::span<const std::size_t> positions) const {
  std::vector<FeatureValue> values;
  values.reserve(positions.size() * dim());
  std::vector<Label> labels;
  std::vector<std::size_t> ids;
  for (std::size_t p : positions) {
    auto r = row(p);
    values.insert(values.end(), r.begin(), r.end());
    labels.push_back(labels_[p]);
    ids.push_back(ids_[p]);
  }
  return LabeledDataset(schema_, std::move(values), std::move(labels),
                        std::move(ids));
}

LabeledDataset LabeledDataset::Project(const FeatureSetConfig& cfg) const {
  std::vector<std::size_t> cols = RestrictIndices(*schema_, cfg);
  auto schema = std::make_shared<const FeatureSchema>(Restrict(*schema_, cfg));
  std::vector<FeatureValue> values;
  values.reserve(size() * cols.size());
  for (std::size_t i = 0; i < size(); ++i) {
    auto r = row(i);
    for (std::size_t c : cols) values.push_back(r[c]);
  }
  return LabeledDataset(std::move(schema), std::move(values), labels_, ids_);
}

LabeledDataset LabeledDataset::WithSchema(
    std::shared_ptr<const FeatureSchema> schema) const {
  if (schema->size() != dim()) {
    throw Error(ErrorCode::kSchemaMismatch, "replacement schema dimension");
  }
  for (std::size_t j = 0; j < dim(); ++j) {
    if (schema->feature(j).name != schema_->feature(j).name) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "replacement schema renames feature", j);
    }
  }
  return LabeledDataset(std::move(schema), values_, labels_, ids_);
}

namespace {

std::string Unquote(std::string_view s) {
  s = Trim(s);
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    s = s.substr(1, s.size() - 2);
  }
  return std::string(s);
}

bool ParseCell(std::string_view cell, int& out) {
  cell = Trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return !cell.empty() && ec == std::errc() &&
         ptr == cell.data() + cell.size();
}

struct RowReader {
  explicit RowReader(const LoadOptions& opts) : options(opts) {}

  const LoadOptions& options;
  std::vector<std::string> names;
  std::size_t label_col = 0;
  std::vector<ValueSet> observed;
  std::vector<FeatureValue> values;
  std::vector<Label> labels;
  std::size_t dropped = 0;

  void SetHeader(std::vector<std::string> header) {
    auto it = std::find(header.begin(), header.end(), options.label_column);
    if (it == header.end()) {
      throw Error(ErrorCode::kParseError,
                  "label column '" + options.label_column + "' not found", 1);
    }
    label_col = static_cast<std::size_t>(it - header.begin());
    header.erase(it);
    names = std::move(header);
    observed.assign(names.size(), ValueSet());
  }

  void AddRow(std::string_view line, std::size_t line_no) {
    std::vector<std::string_view> cells = Split(line, ',');
    if (cells.size() != names.size() + 1) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(names.size() + 1) + " cells, got " +
                      std::to_string(cells.size()),
                  line_no);
    }
    std::vector<FeatureValue> row;
    row.reserve(names.size());
    int label_value = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      int v = 0;
      if (!ParseCell(cells[c], v)) {
        throw Error(ErrorCode::kParseError,
                    "line " + std::to_string(line_no) + ", column " +
                        std::to_string(c + 1) + ": not an integer ('" +
                        std::string(Trim(cells[c])) + "')",
                    line_no);
      }
      if (c == label_col) {
        label_value = v;
        continue;
      }
      if (!IsTernary(v)) {
        if (options.strict) {
          throw Error(ErrorCode::kParseError,
                      "line " + std::to_string(line_no) + ", column " +
                          std::to_string(c + 1) + ": value " +
                          std::to_string(v) + " outside {-1,0,1}",
                      line_no);
        }
        ++dropped;
        return;
      }
      row.push_back(ToFeatureValue(v));
    }
    if (label_value != -1 && label_value != 1) {
      throw Error(ErrorCode::kLabelDomainError,
                  "line " + std::to_string(line_no) + ": label " +
                      std::to_string(label_value) + " not in {-1,+1}",
                  line_no);
    }
    for (std::size_t j = 0; j < row.size(); ++j) observed[j].Insert(row[j]);
    values.insert(values.end(), row.begin(), row.end());
    labels.push_back(static_cast<Label>(label_value));
  }

  LoadedData Finish(const std::vector<ValueSet>* declared) {
    std::vector<FeatureSpec> specs;
    for (std::size_t j = 0; j < names.size(); ++j) {
      FeatureSpec spec;
      spec.name = names[j];
      auto g = options.groups.find(names[j]);
      spec.group = g == options.groups.end() ? FeatureGroup::kSurface : g->second;
      spec.admissible = declared ? (*declared)[j] : observed[j];
      if (spec.admissible.empty()) spec.admissible = ValueSet::Ternary();
      specs.push_back(std::move(spec));
    }
    auto schema = std::make_shared<const FeatureSchema>(std::move(specs));
    return {LabeledDataset(std::move(schema), std::move(values),
                           std::move(labels)),
            dropped};
  }
};

}  // namespace

LoadedData ParseCsv(std::string_view text, const LoadOptions& options) {
  RowReader reader(options);
  std::size_t line_no = 0;
  bool have_header = false;
  for (std::string_view line : Split(text, '\n')) {
    ++line_no;
    line = Trim(line);
    if (line.empty()) continue;
    if (!have_header) {
      if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
          static_cast<unsigned char>(line[1]) == 0xBB &&
          static_cast<unsigned char>(line[2]) == 0xBF) {
        line.remove_prefix(3);
      }
      std::vector<std::string> header;
      for (std::string_view cell : Split(line, ',')) {
        header.push_back(Unquote(cell));
      }
      reader.SetHeader(std::move(header));
      have_header = true;
      continue;
    }
    reader.AddRow(line, line_no);
  }
  if (!have_header) throw Error(ErrorCode::kParseError, "empty CSV", 0);
  return reader.Finish(nullptr);
}

LoadedData ParseArff(std::string_view text, const LoadOptions& options) {
  RowReader reader(options);
  std::vector<std::string> header;
  std::vector<ValueSet> declared;
  bool in_data = false;
  std::size_t line_no = 0;
  for (std::string_view line : Split(text, '\n')) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line.front() == '%') continue;
    if (!in_data) {
      std::string lower = internal::Lower(line);
      if (lower.starts_with("@data")) {
        reader.SetHeader(header);
        in_data = true;
        continue;
      }
      if (!lower.starts_with("@attribute")) continue;
      std::string_view rest = Trim(line.substr(10));
      auto space = rest.find_first_of(" \t");
      if (space == std::string_view::npos) {
        throw Error(ErrorCode::kParseError, "malformed @attribute", line_no);
      }
      std::string name = Unquote(rest.substr(0, space));
      std::string_view type = Trim(rest.substr(space));
      ValueSet set;
      if (!type.empty() && type.front() == '{') {
        auto close = type.find('}');
        for (std::string_view tok :
             Split(type.substr(1, close == std::string_view::npos
                                      ? std::string_view::npos
                                      : close - 1),
                   ',')) {
          int v = 0;
          if (ParseCell(Unquote(tok), v) && IsTernary(v)) {
            set.Insert(ToFeatureValue(v));
          }
        }
      }
      if (name != options.label_column) declared.push_back(set);
      header.push_back(std::move(name));
      continue;
    }
    reader.AddRow(line, line_no);
  }
  if (!in_data) throw Error(ErrorCode::kParseError, "ARFF without @data", 0);
  // Declarations may omit values that occur; widen with what was observed.
  for (std::size_t j = 0; j < declared.size(); ++j) {
    for (FeatureValue v : kAllValues) {
      if (reader.observed[j].Contains(v)) declared[j].Insert(v);
    }
  }
  return reader.Finish(&declared);
}

LoadedData LoadCsv(const std::string& path, const LoadOptions& options) {
  return ParseCsv(internal::ReadFile(path), options);
}

LoadedData LoadArff(const std::string& path, const LoadOptions& options) {
  return ParseArff(internal::ReadFile(path), options);
}

LoadedData LoadDataset(const std::string& path, const LoadOptions& options) {
  if (internal::Lower(path).ends_with(".arff")) return LoadArff(path, options);
  return LoadCsv(path, options);
}

DataSplit StratifiedSplit(const LabeledDataset& dataset, const SplitSpec& spec) {
  if (!(Rational(0) < spec.test_fraction) ||
      !(spec.test_fraction < Rational(1))) {
    throw Error(ErrorCode::kConfigError, "test_fraction must be in (0, 1)");
  }
  const std::size_t n = dataset.size();
  const auto total_test = static_cast<std::size_t>(
      (Rational(static_cast<std::int64_t>(n)) * spec.test_fraction).Ceil());

  std::vector<std::vector<std::size_t>> strata;
  if (spec.stratified) {
    strata.resize(2);
    for (std::size_t i = 0; i < n; ++i) {
      strata[dataset.label(i) == Label::kPhishing ? 0 : 1].push_back(i);
    }
    if (strata[0].empty() || strata[1].empty()) {
      throw Error(ErrorCode::kDegenerateData,
                  "stratified split needs both classes");
    }
  } else {
    strata.resize(1);
    strata[0].resize(n);
    std::iota(strata[0].begin(), strata[0].end(), std::size_t{0});
  }

  std::vector<std::size_t> quota(strata.size());
  std::vector<Rational> remainder(strata.size());
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < strata.size(); ++k) {
    Rational exact =
        Rational(static_cast<std::int64_t>(strata[k].size())) * spec.test_fraction;
    quota[k] = static_cast<std::size_t>(exact.Floor());
    remainder[k] = exact - Rational(exact.Floor());
    assigned += quota[k];
  }
  while (assigned < total_test) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < strata.size(); ++k) {
      if (remainder[best] < remainder[k]) best = k;
    }
    ++quota[best];
    remainder[best] = Rational(-1);
    ++assigned;
  }

  Rng rng(spec.seed);
  DataSplit out;
  out.spec = spec;
  for (std::size_t k = 0; k < strata.size(); ++k) {
    rng.Shuffle(std::span<std::size_t>(strata[k]));
    out.test_rows.insert(out.test_rows.end(), strata[k].begin(),
                         strata[k].begin() + quota[k]);
    out.train_rows.insert(out.train_rows.end(), strata[k].begin() + quota[k],
                          strata[k].end());
  }
  std::sort(out.test_rows.begin(), out.test_rows.end());
  std::sort(out.train_rows.begin(), out.train_rows.end());
  out.train = dataset.Subset(out.train_rows);
  out.test = dataset.Subset(out.test_rows);
  return out;
}

std::string DatasetHash(const LabeledDataset& dataset) {
  internal::Fnv1a h;
  h.Update(dataset.schema().Hash());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (FeatureValue v : dataset.row(i)) {
      h.Update(std::string_view(reinterpret_cast<const char*>(&v), 1));
    }
    h.Update(static_cast<std::uint64_t>(static_cast<int>(dataset.label(i)) + 1));
  }
  return h.Hex();
}

std::string SplitManifestJson(const DataSplit& split,
                              std::string_view dataset_hash) {
  nlohmann::ordered_json j;
  j["format"] = "phishcost.split";
  j["version"] = 1;
  j["dataset_hash"] = dataset_hash;
  j["seed"] = split.spec.seed;
  j["test_fraction"] = split.spec.test_fraction.ToString();
  j["stratified"] = split.spec.stratified;
  j["prng"] = "mt19937_64 + rejection range reduction, Fisher-Yates per class";
  j["train"] = split.train_rows;
  j["test"] = split.test_rows;
  return j.dump() + "\n";
}

ConditioningSet BuildConditioningSet(const Classifier& model,
                                     std::string model_name,
                                     const LabeledDataset& test) {
  ConditioningSet set{std::move(model_name), {}};
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (test.label(i) == Label::kPhishing &&
        model.Predict(test.row(i)) == Label::kPhishing) {
      set.ids.push_back(test.id(i));
    }
  }
  std::sort(set.ids.begin(), set.ids.end());
  return set;
}

std::vector<std::size_t> Intersect(std::span<const ConditioningSet> sets) {
  if (sets.empty()) return {};
  std::vector<std::size_t> acc = sets[0].ids;
  std::sort(acc.begin(), acc.end());
  for (std::size_t k = 1; k < sets.size(); ++k) {
    std::vector<std::size_t> other = sets[k].ids;
    std::sort(other.begin(), other.end());
    std::vector<std::size_t> next;
    std::set_intersection(acc.begin(), acc.end(), other.begin(), other.end(),
                          std::back_inserter(next));
    acc = std::move(next);
  }
  return acc;
}

std::vector<std::size_t> IntersectionSample(
    std::span<const ConditioningSet> sets, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> pool = Intersect(sets);
  if (pool.size() < n) {
    throw Error(ErrorCode::kInsufficientIntersection,
                "intersection has " + std::to_string(pool.size()) +
                    " members, need " + std::to_string(n),
                pool.size());
  }
  Rng rng(seed);
  // Partial Fisher-Yates: the first n slots are a uniform sample.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.Below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace phishcost
