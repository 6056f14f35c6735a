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

#include <gtest/gtest.h>

#include <memory>
#include <vector>

#include "phishcost/error.h"

namespace phishcost {
namespace {

constexpr FeatureValue kP = FeatureValue::kPhishing;
constexpr FeatureValue kN = FeatureValue::kNeutral;
constexpr FeatureValue kL = FeatureValue::kLegitimate;

std::shared_ptr<const FeatureSchema> TwoTernary() {
  return std::make_shared<const FeatureSchema>(std::vector<FeatureSpec>{
      {"a", FeatureGroup::kSurface, ValueSet::Ternary()},
      {"b", FeatureGroup::kSurface, ValueSet::Ternary()}});
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

TEST(ValidateVectorTest, AcceptsMembers) {
  std::vector<int> raw = {-1, 1};
  FeatureVector v = ValidateVector(TwoTernary(), raw);
  EXPECT_EQ(v[0], kP);
  EXPECT_EQ(v[1], kL);
}

TEST(ValidateVectorTest, RejectsOutOfDomainWithIndex) {
  std::vector<int> raw = {-1, 2};
  try {
    ValidateVector(TwoTernary(), raw);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInadmissibleValue);
    EXPECT_EQ(e.index(), 1u);
  }
}

TEST(ValidateVectorTest, RejectsValueOutsideBinarySet) {
  auto schema = std::make_shared<const FeatureSchema>(std::vector<FeatureSpec>{
      {"a", FeatureGroup::kSurface, ValueSet::Of({kP, kL})},
      {"b", FeatureGroup::kSurface, ValueSet::Ternary()}});
  std::vector<int> raw = {0, 1};
  try {
    ValidateVector(schema, raw);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInadmissibleValue);
    EXPECT_EQ(e.index(), 0u);
  }
}

TEST(ValidateVectorTest, RejectsWrongLength) {
  std::vector<int> raw = {0};
  EXPECT_EQ(CodeOf([&] { ValidateVector(TwoTernary(), raw); }),
            ErrorCode::kLengthMismatch);
}

TEST(FeatureSchemaTest, RejectsDuplicatesAndEmptySets) {
  EXPECT_EQ(CodeOf([] {
              FeatureSchema({{"a", FeatureGroup::kSurface, ValueSet::Ternary()},
                             {"a", FeatureGroup::kSurface, ValueSet::Ternary()}});
            }),
            ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([] {
              FeatureSchema({{"a", FeatureGroup::kSurface, ValueSet()}});
            }),
            ErrorCode::kConfigError);
}

TEST(FeatureSchemaTest, HashTracksContent) {
  FeatureSchema a({{"a", FeatureGroup::kSurface, ValueSet::Ternary()}});
  FeatureSchema b({{"a", FeatureGroup::kSemiDomain, ValueSet::Ternary()}});
  EXPECT_EQ(a.Hash(), FeatureSchema(a.features()).Hash());
  EXPECT_NE(a.Hash(), b.Hash());
  EXPECT_EQ(a.Hash().size(), 16u);
}

TEST(AdmissibleEditsTest, FullFanFromBottom) {
  FeatureSchema schema({{"a", FeatureGroup::kSurface, ValueSet::Ternary()}});
  std::vector<FeatureValue> x = {kP};
  std::vector<Transition> expected = {{0, kP, kN}, {0, kP, kL}};
  EXPECT_EQ(AdmissibleEdits(schema, x), expected);
}

TEST(AdmissibleEditsTest, TopHasNoEdits) {
  FeatureSchema schema({{"a", FeatureGroup::kSurface, ValueSet::Ternary()}});
  std::vector<FeatureValue> x = {kL};
  EXPECT_TRUE(AdmissibleEdits(schema, x).empty());
}

TEST(AdmissibleEditsTest, RespectsBinarySets) {
  FeatureSchema schema({{"a", FeatureGroup::kSurface, ValueSet::Ternary()},
                        {"b", FeatureGroup::kSurface, ValueSet::Of({kP, kL})}});
  std::vector<FeatureValue> x = {kN, kP};
  std::vector<Transition> expected = {{0, kN, kL}, {1, kP, kL}};
  EXPECT_EQ(AdmissibleEdits(schema, x), expected);
}

TEST(AdmissibleEditsTest, EveryEditIsUpwardAndAdmissible) {
  FeatureSchema schema({{"a", FeatureGroup::kSurface, ValueSet::Ternary()},
                        {"b", FeatureGroup::kSurface, ValueSet::Of({kP, kL})},
                        {"c", FeatureGroup::kSurface, ValueSet::Of({kN, kL})}});
  for (FeatureValue a : schema.feature(0).admissible.Values()) {
    for (FeatureValue b : schema.feature(1).admissible.Values()) {
      for (FeatureValue c : schema.feature(2).admissible.Values()) {
        std::vector<FeatureValue> x = {a, b, c};
        for (const Transition& t : AdmissibleEdits(schema, x)) {
          EXPECT_EQ(t.from, x[t.feature]);
          EXPECT_GT(ToInt(t.to), ToInt(t.from));
          EXPECT_TRUE(schema.feature(t.feature).admissible.Contains(t.to));
        }
      }
    }
  }
}

FeatureSchema Base30() {
  std::vector<FeatureSpec> specs;
  for (const auto& [name, group] : DefaultGroupMap()) {
    specs.push_back({name, group, ValueSet::Ternary()});
  }
  return FeatureSchema(std::move(specs));
}

TEST(RestrictTest, FullIsIdentity) {
  FeatureSchema base = Base30();
  FeatureSetConfig full{"Full", base.Names()};
  EXPECT_EQ(Restrict(base, full), base);
}

TEST(RestrictTest, SubsetKeepsNamedMembers) {
  FeatureSchema base = Base30();
  FeatureSetConfig cfg{"RA-8",
                       {"SSLfinal_State", "URL_of_Anchor", "SFH", "web_traffic",
                        "Links_in_tags", "Prefix_Suffix", "age_of_domain",
                        "having_Sub_Domain"}};
  FeatureSchema r = Restrict(base, cfg);
  EXPECT_EQ(r.size(), 8u);
  EXPECT_TRUE(r.IndexOf("SSLfinal_State").has_value());
}

TEST(RestrictTest, UnknownMemberFails) {
  FeatureSchema base = Base30();
  FeatureSetConfig cfg{"bad", {"nonexistent"}};
  EXPECT_EQ(CodeOf([&] { Restrict(base, cfg); }), ErrorCode::kUnknownFeature);
}

TEST(DefaultGroupMapTest, CoversThirtyFeatures) {
  EXPECT_EQ(DefaultGroupMap().size(), 30u);
  EXPECT_EQ(DefaultGroupMap().at("SSLfinal_State"), FeatureGroup::kSurface);
}

TEST(FeatureConfigTest, RoundTrips) {
  FeatureConfig cfg = ParseFeatureConfig(
      "version = 1\n[groups]\na = surface\nb = infrastructure\n"
      "[set small]\nmembers = a, b\n");
  EXPECT_EQ(cfg.groups.at("b"), FeatureGroup::kInfrastructure);
  ASSERT_NE(cfg.FindSet("small"), nullptr);
  EXPECT_EQ(cfg.FindSet("small")->members.size(), 2u);
  FeatureConfig again = ParseFeatureConfig(FormatFeatureConfig(cfg));
  EXPECT_EQ(again.groups, cfg.groups);
  EXPECT_EQ(again.FindSet("small")->members, cfg.FindSet("small")->members);
}

TEST(FeatureConfigTest, RejectsUnknownGroup) {
  EXPECT_EQ(CodeOf([] { ParseFeatureConfig("[groups]\na = orbit\n"); }),
            ErrorCode::kConfigError);
}

}  // namespace
}  // namespace phishcost
