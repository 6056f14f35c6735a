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

#ifndef PHISHCOST_FEATURE_SCHEMA_H_
#define PHISHCOST_FEATURE_SCHEMA_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phishcost {

// Ternary feature state, ordered kPhishing < kNeutral < kLegitimate.
enum class FeatureValue : std::int8_t {
  kPhishing = -1,
  kNeutral = 0,
  kLegitimate = 1,
};

inline constexpr int ToInt(FeatureValue v) { return static_cast<int>(v); }
// Precondition: -1 <= v <= 1.
inline constexpr FeatureValue ToFeatureValue(int v) {
  return static_cast<FeatureValue>(v);
}
inline constexpr bool IsTernary(int v) { return v >= -1 && v <= 1; }

inline constexpr FeatureValue kAllValues[] = {
    FeatureValue::kPhishing, FeatureValue::kNeutral, FeatureValue::kLegitimate};

enum class FeatureGroup : std::uint8_t {
  kSurface = 0,
  kSemiDomain = 1,
  kInfrastructure = 2,
};

inline constexpr FeatureGroup kAllGroups[] = {
    FeatureGroup::kSurface, FeatureGroup::kSemiDomain,
    FeatureGroup::kInfrastructure};

std::string_view GroupName(FeatureGroup group);
// Accepts "surface", "semi_domain"/"semi-domain"/"semidomain",
// "infrastructure" (case-insensitive).
std::optional<FeatureGroup> ParseGroup(std::string_view text);

// Nonempty subset of {-1, 0, +1}.
class ValueSet {
 public:
  constexpr ValueSet() = default;
  static constexpr ValueSet Ternary() { return ValueSet(0b111); }
  static ValueSet Of(std::initializer_list<FeatureValue> values);

  bool Contains(FeatureValue v) const { return bits_ & Bit(v); }
  void Insert(FeatureValue v) { bits_ |= Bit(v); }
  bool empty() const { return bits_ == 0; }
  std::uint8_t bits() const { return bits_; }
  std::vector<FeatureValue> Values() const;

  friend bool operator==(ValueSet, ValueSet) = default;

 private:
  explicit constexpr ValueSet(std::uint8_t bits) : bits_(bits) {}
  static constexpr std::uint8_t Bit(FeatureValue v) {
    return static_cast<std::uint8_t>(1u << (ToInt(v) + 1));
  }
  std::uint8_t bits_ = 0;
};

struct FeatureSpec {
  std::string name;
  FeatureGroup group = FeatureGroup::kSurface;
  ValueSet admissible = ValueSet::Ternary();
};

// Ordered, immutable feature list. Order is the dataset column order and
// fixes every downstream tie-break.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  // Throws Error(kConfigError) on duplicate names or empty admissible sets.
  explicit FeatureSchema(std::vector<FeatureSpec> features);

  std::size_t size() const { return features_.size(); }
  bool empty() const { return features_.empty(); }
  const FeatureSpec& feature(std::size_t j) const { return features_[j]; }
  const std::vector<FeatureSpec>& features() const { return features_; }
  std::optional<std::size_t> IndexOf(std::string_view name) const;
  std::vector<std::string> Names() const;

  // Stable 64-bit FNV-1a digest of names, groups and admissible sets,
  // rendered as 16 hex digits.
  std::string Hash() const;

  friend bool operator==(const FeatureSchema& a, const FeatureSchema& b) {
    return a.features_ == b.features_;
  }

 private:
  std::vector<FeatureSpec> features_;
};

inline bool operator==(const FeatureSpec& a, const FeatureSpec& b) {
  return a.name == b.name && a.group == b.group && a.admissible == b.admissible;
}

// A value vector validated against, and bound to, a schema.
class FeatureVector {
 public:
  FeatureVector(std::shared_ptr<const FeatureSchema> schema,
                std::vector<FeatureValue> values);

  const FeatureSchema& schema() const { return *schema_; }
  const std::shared_ptr<const FeatureSchema>& schema_ptr() const {
    return schema_;
  }
  std::span<const FeatureValue> values() const { return values_; }
  FeatureValue operator[](std::size_t j) const { return values_[j]; }
  std::size_t size() const { return values_.size(); }

 private:
  std::shared_ptr<const FeatureSchema> schema_;
  std::vector<FeatureValue> values_;
};

// Throws Error(kLengthMismatch) or Error(kInadmissibleValue) with the index.
FeatureVector ValidateVector(std::shared_ptr<const FeatureSchema> schema,
                             std::span<const int> raw);
// Same check without binding; throws on the first bad coordinate.
void CheckAdmissible(const FeatureSchema& schema,
                     std::span<const FeatureValue> values);

// A single upward move of one coordinate.
struct Transition {
  std::size_t feature = 0;
  FeatureValue from = FeatureValue::kPhishing;
  FeatureValue to = FeatureValue::kPhishing;

  friend bool operator==(const Transition&, const Transition&) = default;
};

// Every strictly increasing single-coordinate move whose target is
// admissible, ordered by ascending feature then ascending target.
std::vector<Transition> AdmissibleEdits(const FeatureSchema& schema,
                                        std::span<const FeatureValue> x);
std::vector<Transition> AdmissibleEdits(const FeatureVector& x);

struct FeatureSetConfig {
  std::string name;
  std::vector<std::string> members;
};

// Arity of the six built-in configurations; nullopt for user-defined names.
std::optional<std::size_t> BuiltinArity(std::string_view name);
const std::vector<std::string>& BuiltinFeatureSetNames();

// Schema with exactly cfg.members, in cfg order, metadata preserved.
FeatureSchema Restrict(const FeatureSchema& schema,
                       const FeatureSetConfig& cfg);
// Base-schema coordinate of each member of cfg.
std::vector<std::size_t> RestrictIndices(const FeatureSchema& schema,
                                         const FeatureSetConfig& cfg);

// Feature-set and group-map configuration file contents.
struct FeatureConfig {
  std::map<std::string, FeatureGroup> groups;
  std::vector<FeatureSetConfig> sets;

  const FeatureSetConfig* FindSet(std::string_view name) const;
};

// Grammar (line oriented, '#' starts a comment):
//   [groups]            followed by   <feature> = <group>
//   [set <name>]        followed by   members = <f1>, <f2>, ...
// A members list may span lines; continuation lines start with whitespace.
FeatureConfig ParseFeatureConfig(std::string_view text);
FeatureConfig LoadFeatureConfig(const std::string& path);
std::string FormatFeatureConfig(const FeatureConfig& config);

// Group assignment for the 30 UCI Phishing Websites columns.
const std::map<std::string, FeatureGroup>& DefaultGroupMap();

// Returns schema with groups replaced for every feature named in `groups`.
// Features absent from the map keep their current group.
FeatureSchema ApplyGroupMap(const FeatureSchema& schema,
                            const std::map<std::string, FeatureGroup>& groups);

// Checks member existence and built-in arity; throws kUnknownFeature or
// kConfigError.
void ValidateFeatureSet(const FeatureSchema& schema,
                        const FeatureSetConfig& cfg);

}  // namespace phishcost

#endif  // PHISHCOST_FEATURE_SCHEMA_H_
