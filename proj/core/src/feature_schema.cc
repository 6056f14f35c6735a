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

#include "phishcost/feature_schema.h"

#include <set>
#include <sstream>
#include <utility>

#include "internal.h"
#include "phishcost/error.h"

namespace phishcost {

using internal::Lower;
using internal::Split;
using internal::Trim;

std::string_view GroupName(FeatureGroup group) {
  switch (group) {
    case FeatureGroup::kSurface: return "surface";
    case FeatureGroup::kSemiDomain: return "semi_domain";
    case FeatureGroup::kInfrastructure: return "infrastructure";
  }
  return "unknown";
}

std::optional<FeatureGroup> ParseGroup(std::string_view text) {
  std::string s = Lower(Trim(text));
  if (s == "surface") return FeatureGroup::kSurface;
  if (s == "semi_domain" || s == "semi-domain" || s == "semidomain") {
    return FeatureGroup::kSemiDomain;
  }
  if (s == "infrastructure" || s == "infra") {
    return FeatureGroup::kInfrastructure;
  }
  return std::nullopt;
}

ValueSet ValueSet::Of(std::initializer_list<FeatureValue> values) {
  ValueSet s;
  for (FeatureValue v : values) s.Insert(v);
  return s;
}

std::vector<FeatureValue> ValueSet::Values() const {
  std::vector<FeatureValue> out;
  for (FeatureValue v : kAllValues) {
    if (Contains(v)) out.push_back(v);
  }
  return out;
}

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features)
    : features_(std::move(features)) {
  std::set<std::string_view> seen;
  for (std::size_t j = 0; j < features_.size(); ++j) {
    const FeatureSpec& f = features_[j];
    if (f.admissible.empty()) {
      throw Error(ErrorCode::kConfigError,
                  "feature '" + f.name + "' has an empty admissible set", j);
    }
    if (!seen.insert(f.name).second) {
      throw Error(ErrorCode::kConfigError,
                  "duplicate feature name '" + f.name + "'", j);
    }
  }
}

std::optional<std::size_t> FeatureSchema::IndexOf(std::string_view name) const {
  for (std::size_t j = 0; j < features_.size(); ++j) {
    if (features_[j].name == name) return j;
  }
  return std::nullopt;
}

std::vector<std::string> FeatureSchema::Names() const {
  std::vector<std::string> out;
  out.reserve(features_.size());
  for (const auto& f : features_) out.push_back(f.name);
  return out;
}

std::string FeatureSchema::Hash() const {
  internal::Fnv1a h;
  for (const auto& f : features_) {
    h.Update(f.name);
    h.Update(std::uint64_t{static_cast<std::uint8_t>(f.group)});
    h.Update(std::uint64_t{f.admissible.bits()});
  }
  return h.Hex();
}

FeatureVector::FeatureVector(std::shared_ptr<const FeatureSchema> schema,
                             std::vector<FeatureValue> values)
    : schema_(std::move(schema)), values_(std::move(values)) {
  CheckAdmissible(*schema_, values_);
}

void CheckAdmissible(const FeatureSchema& schema,
                     std::span<const FeatureValue> values) {
  if (values.size() != schema.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "vector has " + std::to_string(values.size()) +
                    " entries, schema has " + std::to_string(schema.size()),
                values.size());
  }
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!IsTernary(ToInt(values[j])) ||
        !schema.feature(j).admissible.Contains(values[j])) {
      throw Error(ErrorCode::kInadmissibleValue,
                  "value " + std::to_string(ToInt(values[j])) +
                      " not admissible for '" + schema.feature(j).name + "'",
                  j);
    }
  }
}

FeatureVector ValidateVector(std::shared_ptr<const FeatureSchema> schema,
                             std::span<const int> raw) {
  if (raw.size() != schema->size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "vector has " + std::to_string(raw.size()) +
                    " entries, schema has " + std::to_string(schema->size()),
                raw.size());
  }
  std::vector<FeatureValue> values(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    if (!IsTernary(raw[j]) ||
        !schema->feature(j).admissible.Contains(ToFeatureValue(raw[j]))) {
      throw Error(ErrorCode::kInadmissibleValue,
                  "value " + std::to_string(raw[j]) + " not admissible for '" +
                      schema->feature(j).name + "'",
                  j);
    }
    values[j] = ToFeatureValue(raw[j]);
  }
  return FeatureVector(std::move(schema), std::move(values));
}

std::vector<Transition> AdmissibleEdits(const FeatureSchema& schema,
                                        std::span<const FeatureValue> x) {
  std::vector<Transition> out;
  for (std::size_t j = 0; j < x.size(); ++j) {
    for (FeatureValue to : kAllValues) {
      if (ToInt(to) > ToInt(x[j]) && schema.feature(j).admissible.Contains(to)) {
        out.push_back({j, x[j], to});
      }
    }
  }
  return out;
}

std::vector<Transition> AdmissibleEdits(const FeatureVector& x) {
  return AdmissibleEdits(x.schema(), x.values());
}

std::optional<std::size_t> BuiltinArity(std::string_view name) {
  if (name == "Full") return 30;
  if (name == "AAS-12a") return 12;
  if (name == "AAS-11b") return 11;
  if (name == "RA-8") return 8;
  if (name == "VA-8a") return 8;
  if (name == "VA-7b") return 7;
  return std::nullopt;
}

const std::vector<std::string>& BuiltinFeatureSetNames() {
  static const std::vector<std::string> names = {
      "Full", "AAS-12a", "AAS-11b", "RA-8", "VA-8a", "VA-7b"};
  return names;
}

std::vector<std::size_t> RestrictIndices(const FeatureSchema& schema,
                                         const FeatureSetConfig& cfg) {
  std::vector<std::size_t> idx;
  idx.reserve(cfg.members.size());
  for (const auto& m : cfg.members) {
    auto j = schema.IndexOf(m);
    if (!j) {
      throw Error(ErrorCode::kUnknownFeature,
                  "feature set '" + cfg.name + "' names unknown feature '" +
                      m + "'");
    }
    idx.push_back(*j);
  }
  return idx;
}

FeatureSchema Restrict(const FeatureSchema& schema,
                       const FeatureSetConfig& cfg) {
  std::vector<FeatureSpec> specs;
  for (std::size_t j : RestrictIndices(schema, cfg)) {
    specs.push_back(schema.feature(j));
  }
  return FeatureSchema(std::move(specs));
}

void ValidateFeatureSet(const FeatureSchema& schema,
                        const FeatureSetConfig& cfg) {
  RestrictIndices(schema, cfg);
  if (auto arity = BuiltinArity(cfg.name);
      arity && *arity != cfg.members.size() &&
      !(cfg.name == "Full" && cfg.members.size() == schema.size())) {
    throw Error(ErrorCode::kConfigError,
                "feature set '" + cfg.name + "' must have " +
                    std::to_string(*arity) + " members, has " +
                    std::to_string(cfg.members.size()));
  }
  if (cfg.name == "RA-8") {
    bool has_ssl = false;
    for (const auto& m : cfg.members) has_ssl |= (m == "SSLfinal_State");
    if (!has_ssl && schema.IndexOf("SSLfinal_State")) {
      throw Error(ErrorCode::kConfigError,
                  "RA-8 must contain SSLfinal_State");
    }
  }
}

const FeatureSetConfig* FeatureConfig::FindSet(std::string_view name) const {
  for (const auto& s : sets) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

FeatureConfig ParseFeatureConfig(std::string_view text) {
  FeatureConfig config;
  enum class Section { kNone, kGroups, kSet } section = Section::kNone;
  FeatureSetConfig* current = nullptr;
  bool in_members = false;
  std::size_t line_no = 0;

  auto add_members = [&](std::string_view list) {
    for (std::string_view item : Split(list, ',')) {
      item = Trim(item);
      if (!item.empty()) current->members.emplace_back(item);
    }
  };

  for (std::string_view raw : Split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    bool continuation =
        !line.empty() && (line.front() == ' ' || line.front() == '\t');
    line = Trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      in_members = false;
      if (line.back() != ']') {
        throw Error(ErrorCode::kConfigError, "unterminated section header",
                    line_no);
      }
      std::string_view header = Trim(line.substr(1, line.size() - 2));
      if (header == "groups") {
        section = Section::kGroups;
      } else if (header.starts_with("set ")) {
        section = Section::kSet;
        std::string name(Trim(header.substr(4)));
        if (name.empty() || config.FindSet(name)) {
          throw Error(ErrorCode::kConfigError,
                      "missing or duplicate set name '" + name + "'", line_no);
        }
        config.sets.push_back({name, {}});
        current = &config.sets.back();
      } else {
        throw Error(ErrorCode::kConfigError,
                    "unknown section '" + std::string(header) + "'", line_no);
      }
      continue;
    }

    if (continuation && in_members) {
      add_members(line);
      continue;
    }
    in_members = false;

    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfigError,
                  "expected key = value: '" + std::string(line) + "'", line_no);
    }
    std::string_view key = Trim(line.substr(0, eq));
    std::string_view value = Trim(line.substr(eq + 1));
    switch (section) {
      case Section::kNone:
        if (key != "version") {
          throw Error(ErrorCode::kConfigError,
                      "key outside a section: '" + std::string(key) + "'",
                      line_no);
        }
        if (value != "1") {
          throw Error(ErrorCode::kConfigError,
                      "unsupported config version " + std::string(value),
                      line_no);
        }
        break;
      case Section::kGroups: {
        auto group = ParseGroup(value);
        if (!group) {
          throw Error(ErrorCode::kConfigError,
                      "unknown group '" + std::string(value) + "'", line_no);
        }
        config.groups[std::string(key)] = *group;
        break;
      }
      case Section::kSet:
        if (key != "members") {
          throw Error(ErrorCode::kConfigError,
                      "unknown set key '" + std::string(key) + "'", line_no);
        }
        add_members(value);
        in_members = true;
        break;
    }
  }
  return config;
}

FeatureConfig LoadFeatureConfig(const std::string& path) {
  return ParseFeatureConfig(internal::ReadFile(path));
}

std::string FormatFeatureConfig(const FeatureConfig& config) {
  std::ostringstream os;
  os << "version = 1\n\n[groups]\n";
  for (const auto& [name, group] : config.groups) {
    os << name << " = " << GroupName(group) << "\n";
  }
  for (const auto& set : config.sets) {
    os << "\n[set " << set.name << "]\nmembers =";
    for (std::size_t i = 0; i < set.members.size(); ++i) {
      if (i % 4 == 0) os << (i == 0 ? " " : "\n    ");
      os << set.members[i] << (i + 1 < set.members.size() ? ", " : "");
    }
    os << "\n";
  }
  return os.str();
}

const std::map<std::string, FeatureGroup>& DefaultGroupMap() {
  using G = FeatureGroup;
  static const std::map<std::string, FeatureGroup> map = {
      // URL structure, page markup and certificate presentation.
      {"having_IP_Address", G::kSurface},
      {"URL_Length", G::kSurface},
      {"Shortining_Service", G::kSurface},
      {"having_At_Symbol", G::kSurface},
      {"double_slash_redirecting", G::kSurface},
      {"Prefix_Suffix", G::kSurface},
      {"having_Sub_Domain", G::kSurface},
      {"SSLfinal_State", G::kSurface},
      {"Favicon", G::kSurface},
      {"port", G::kSurface},
      {"HTTPS_token", G::kSurface},
      {"Request_URL", G::kSurface},
      {"URL_of_Anchor", G::kSurface},
      {"Links_in_tags", G::kSurface},
      {"SFH", G::kSurface},
      {"Submitting_to_email", G::kSurface},
      {"Redirect", G::kSurface},
      {"on_mouseover", G::kSurface},
      {"RightClick", G::kSurface},
      {"popUpWidnow", G::kSurface},
      {"Iframe", G::kSurface},
      // Registration and indexing.
      {"Domain_registeration_length", G::kSemiDomain},
      {"Abnormal_URL", G::kSemiDomain},
      {"Google_Index", G::kSemiDomain},
      {"Links_pointing_to_page", G::kSemiDomain},
      // Traffic, DNS, age, rank and reputation.
      {"age_of_domain", G::kInfrastructure},
      {"DNSRecord", G::kInfrastructure},
      {"web_traffic", G::kInfrastructure},
      {"Page_Rank", G::kInfrastructure},
      {"Statistical_report", G::kInfrastructure},
  };
  return map;
}

FeatureSchema ApplyGroupMap(const FeatureSchema& schema,
                            const std::map<std::string, FeatureGroup>& groups) {
  std::vector<FeatureSpec> specs = schema.features();
  for (auto& f : specs) {
    if (auto it = groups.find(f.name); it != groups.end()) f.group = it->second;
  }
  return FeatureSchema(std::move(specs));
}

}  // namespace phishcost
