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

#ifndef PHISHCOST_COST_MODEL_H_
#define PHISHCOST_COST_MODEL_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "phishcost/cost.h"
#include "phishcost/feature_schema.h"

namespace phishcost {

// The three upward transitions, in table column order.
enum class Step : std::uint8_t {
  kPhishingToNeutral = 0,     // -1 -> 0
  kPhishingToLegitimate = 1,  // -1 -> +1
  kNeutralToLegitimate = 2,   //  0 -> +1
};

inline constexpr Step kAllSteps[] = {Step::kPhishingToNeutral,
                                     Step::kPhishingToLegitimate,
                                     Step::kNeutralToLegitimate};

// nullopt unless to > from.
std::optional<Step> StepOf(FeatureValue from, FeatureValue to);

// Per-group transition cost table.
class CostSchedule {
 public:
  using Row = std::array<Cost, 3>;

  CostSchedule() = default;
  CostSchedule(std::string name, Row surface, Row semi_domain,
               Row infrastructure);

  static CostSchedule Base();
  static CostSchedule Strict();
  // "base" or "strict"; nullopt otherwise.
  static std::optional<CostSchedule> Builtin(std::string_view name);

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  const Cost& at(FeatureGroup group, Step step) const {
    return table_[static_cast<int>(group)][static_cast<int>(step)];
  }
  Cost& at(FeatureGroup group, Step step) {
    return table_[static_cast<int>(group)][static_cast<int>(step)];
  }

  // Groups whose direct -1 -> +1 entry exceeds the two-step route.
  std::vector<FeatureGroup> TriangleViolations() const;

  friend bool operator==(const CostSchedule& a, const CostSchedule& b) {
    return a.table_ == b.table_;
  }

 private:
  std::string name_;
  std::array<Row, 3> table_{};
};

// Infinite for reverse or identity moves.
Cost TransitionCost(const CostSchedule& schedule, const FeatureSchema& schema,
                    std::size_t j, FeatureValue from, FeatureValue to);

// Sum of direct per-coordinate costs; Infinite unless target >= source
// coordinate-wise. Throws kSchemaMismatch on length mismatch.
Cost CumulativeCost(const CostSchedule& schedule, const FeatureSchema& schema,
                    std::span<const FeatureValue> source,
                    std::span<const FeatureValue> target);
Cost CumulativeCost(const CostSchedule& schedule, const FeatureVector& source,
                    const FeatureVector& target);

// Cheapest finite transition over coordinates and their admissible moves.
Cost MinTransitionCost(const CostSchedule& schedule,
                       const FeatureSchema& schema);

struct ScaleGroup {
  FeatureGroup group = FeatureGroup::kSurface;
  Rational factor{1};
};

struct ReclassifyFeature {
  std::string feature;
  FeatureGroup group = FeatureGroup::kSemiDomain;
};

// Multiplies every finite cell by an independent factor drawn uniformly from
// the 1/100 grid on [lower, upper]. Draws that would break the strict
// surface < semi-domain < infrastructure order of any transition column are
// redrawn.
struct RankPreservingNoise {
  std::uint64_t seed = 0;
  Rational lower{4, 5};
  Rational upper{6, 5};
};

using CostPerturbation =
    std::variant<ScaleGroup, ReclassifyFeature, RankPreservingNoise>;

struct PerturbedCosts {
  CostSchedule schedule;
  FeatureSchema schema;
};

PerturbedCosts ApplyPerturbation(const CostSchedule& schedule,
                                 const FeatureSchema& schema,
                                 const CostPerturbation& perturbation);

std::string DescribePerturbation(const CostPerturbation& perturbation);

// True when, for every step with three finite entries, surface < semi-domain
// < infrastructure.
bool PreservesGroupOrder(const CostSchedule& schedule);

// Schedule file grammar ('#' comments):
//   name = <name>
//   surface        = <c(-1->0)> <c(-1->+1)> <c(0->+1)>
//   semi_domain    = ...
//   infrastructure = ...
// Entries are integers, fractions ("3/2"), decimals or "inf". Schedules
// whose direct -1 -> +1 cost exceeds the two-step route are rejected.
CostSchedule ParseSchedule(std::string_view text);
CostSchedule LoadSchedule(const std::string& path);
std::string FormatSchedule(const CostSchedule& schedule);

// Builtin name, or a path to a schedule file.
CostSchedule ResolveSchedule(const std::string& name_or_path);

}  // namespace phishcost

#endif  // PHISHCOST_COST_MODEL_H_
