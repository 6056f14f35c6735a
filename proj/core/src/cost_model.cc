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

#include "phishcost/cost_model.h"

#include <sstream>

#include "internal.h"
#include "phishcost/error.h"
#include "phishcost/random.h"

namespace phishcost {

using internal::Split;
using internal::Trim;

std::optional<Step> StepOf(FeatureValue from, FeatureValue to) {
  if (from == FeatureValue::kPhishing && to == FeatureValue::kNeutral) {
    return Step::kPhishingToNeutral;
  }
  if (from == FeatureValue::kPhishing && to == FeatureValue::kLegitimate) {
    return Step::kPhishingToLegitimate;
  }
  if (from == FeatureValue::kNeutral && to == FeatureValue::kLegitimate) {
    return Step::kNeutralToLegitimate;
  }
  return std::nullopt;
}

CostSchedule::CostSchedule(std::string name, Row surface, Row semi_domain,
                           Row infrastructure)
    : name_(std::move(name)), table_{surface, semi_domain, infrastructure} {}

CostSchedule CostSchedule::Base() {
  return CostSchedule("base", {1, 2, 1}, {3, 6, 3}, {4, 8, 4});
}

CostSchedule CostSchedule::Strict() {
  return CostSchedule("strict", {1, 2, 1}, {3, 6, 3},
                      {4, Cost::Infinite(), Cost::Infinite()});
}

std::optional<CostSchedule> CostSchedule::Builtin(std::string_view name) {
  if (name == "base") return Base();
  if (name == "strict") return Strict();
  return std::nullopt;
}

std::vector<FeatureGroup> CostSchedule::TriangleViolations() const {
  std::vector<FeatureGroup> out;
  for (FeatureGroup g : kAllGroups) {
    Cost two_step =
        at(g, Step::kPhishingToNeutral) + at(g, Step::kNeutralToLegitimate);
    if (at(g, Step::kPhishingToLegitimate) > two_step) out.push_back(g);
  }
  return out;
}

Cost TransitionCost(const CostSchedule& schedule, const FeatureSchema& schema,
                    std::size_t j, FeatureValue from, FeatureValue to) {
  auto step = StepOf(from, to);
  if (!step) return Cost::Infinite();
  return schedule.at(schema.feature(j).group, *step);
}

Cost CumulativeCost(const CostSchedule& schedule, const FeatureSchema& schema,
                    std::span<const FeatureValue> source,
                    std::span<const FeatureValue> target) {
  if (source.size() != schema.size() || target.size() != schema.size()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "vectors do not match schema dimension " +
                    std::to_string(schema.size()));
  }
  Cost total = 0;
  for (std::size_t j = 0; j < source.size(); ++j) {
    if (source[j] == target[j]) continue;
    total += TransitionCost(schedule, schema, j, source[j], target[j]);
    if (total.is_infinite()) return total;
  }
  return total;
}

Cost CumulativeCost(const CostSchedule& schedule, const FeatureVector& source,
                    const FeatureVector& target) {
  if (!(source.schema() == target.schema())) {
    throw Error(ErrorCode::kSchemaMismatch,
                "source and target are bound to different schemas");
  }
  return CumulativeCost(schedule, source.schema(), source.values(),
                        target.values());
}

Cost MinTransitionCost(const CostSchedule& schedule,
                       const FeatureSchema& schema) {
  Cost best = Cost::Infinite();
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const ValueSet& adm = schema.feature(j).admissible;
    for (FeatureValue from : kAllValues) {
      if (!adm.Contains(from)) continue;
      for (FeatureValue to : kAllValues) {
        if (ToInt(to) <= ToInt(from) || !adm.Contains(to)) continue;
        Cost c = TransitionCost(schedule, schema, j, from, to);
        if (c < best) best = c;
      }
    }
  }
  return best;
}

bool PreservesGroupOrder(const CostSchedule& schedule) {
  for (Step s : kAllSteps) {
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        const Cost& lo = schedule.at(kAllGroups[a], s);
        const Cost& hi = schedule.at(kAllGroups[b], s);
        if (lo.is_finite() && hi.is_finite() && !(lo < hi)) return false;
      }
    }
  }
  return true;
}

namespace {

CostSchedule DrawNoise(const CostSchedule& schedule,
                       const RankPreservingNoise& noise) {
  if (!(Rational(0) < noise.lower) || noise.upper < noise.lower) {
    throw Error(ErrorCode::kConfigError,
                "noise factors must satisfy 0 < lower <= upper");
  }
  const std::int64_t lo = (noise.lower * Rational(100)).Ceil();
  const std::int64_t hi = (noise.upper * Rational(100)).Floor();
  if (hi < lo) {
    throw Error(ErrorCode::kConfigError,
                "noise interval contains no multiple of 1/100");
  }
  Rng rng(noise.seed);
  constexpr int kMaxAttempts = 100000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    CostSchedule out = schedule;
    for (FeatureGroup g : kAllGroups) {
      for (Step s : kAllSteps) {
        Rational factor(rng.Between(lo, hi), 100);
        out.at(g, s) = schedule.at(g, s) * factor;
      }
    }
    if (PreservesGroupOrder(out) || !PreservesGroupOrder(schedule)) return out;
  }
  throw Error(ErrorCode::kConfigError,
              "could not draw an order-preserving noise sample");
}

}  // namespace

PerturbedCosts ApplyPerturbation(const CostSchedule& schedule,
                                 const FeatureSchema& schema,
                                 const CostPerturbation& perturbation) {
  PerturbedCosts out{schedule, schema};
  out.schedule.set_name(schedule.name() + "+" +
                        DescribePerturbation(perturbation));
  if (const auto* scale = std::get_if<ScaleGroup>(&perturbation)) {
    if (!(Rational(0) < scale->factor)) {
      throw Error(ErrorCode::kConfigError, "scale factor must be positive");
    }
    for (Step s : kAllSteps) {
      out.schedule.at(scale->group, s) =
          schedule.at(scale->group, s) * scale->factor;
    }
  } else if (const auto* re = std::get_if<ReclassifyFeature>(&perturbation)) {
    auto j = schema.IndexOf(re->feature);
    if (!j) {
      throw Error(ErrorCode::kUnknownFeature,
                  "cannot reclassify unknown feature '" + re->feature + "'");
    }
    std::vector<FeatureSpec> specs = schema.features();
    specs[*j].group = re->group;
    out.schema = FeatureSchema(std::move(specs));
  } else {
    std::string name = out.schedule.name();
    out.schedule =
        DrawNoise(schedule, std::get<RankPreservingNoise>(perturbation));
    out.schedule.set_name(std::move(name));
  }
  return out;
}

std::string DescribePerturbation(const CostPerturbation& perturbation) {
  if (const auto* scale = std::get_if<ScaleGroup>(&perturbation)) {
    return "scale(" + std::string(GroupName(scale->group)) + "," +
           scale->factor.ToString() + ")";
  }
  if (const auto* re = std::get_if<ReclassifyFeature>(&perturbation)) {
    return "reclassify(" + re->feature + "," +
           std::string(GroupName(re->group)) + ")";
  }
  const auto& noise = std::get<RankPreservingNoise>(perturbation);
  return "noise(" + std::to_string(noise.seed) + "," +
         noise.lower.ToString() + "," + noise.upper.ToString() + ")";
}

CostSchedule ParseSchedule(std::string_view text) {
  CostSchedule schedule("custom", {1, 2, 1}, {3, 6, 3}, {4, 8, 4});
  bool seen[3] = {false, false, false};
  std::size_t line_no = 0;
  for (std::string_view line : Split(text, '\n')) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfigError,
                  "expected key = value: '" + std::string(line) + "'", line_no);
    }
    std::string_view key = Trim(line.substr(0, eq));
    std::string_view value = Trim(line.substr(eq + 1));
    if (key == "name") {
      schedule.set_name(std::string(value));
      continue;
    }
    auto group = ParseGroup(key);
    if (!group) {
      throw Error(ErrorCode::kConfigError,
                  "unknown schedule key '" + std::string(key) + "'", line_no);
    }
    std::vector<std::string_view> cells;
    for (std::string_view tok : Split(value, ' ')) {
      tok = Trim(tok);
      if (!tok.empty()) cells.push_back(tok);
    }
    if (cells.size() != 3) {
      throw Error(ErrorCode::kConfigError,
                  "expected 3 cells for group '" + std::string(key) + "'",
                  line_no);
    }
    for (int i = 0; i < 3; ++i) {
      try {
        schedule.at(*group, kAllSteps[i]) = Cost::Parse(cells[i]);
      } catch (const Error& e) {
        throw Error(ErrorCode::kConfigError, e.what(), line_no);
      }
    }
    seen[static_cast<int>(*group)] = true;
  }
  for (FeatureGroup g : kAllGroups) {
    if (!seen[static_cast<int>(g)]) {
      throw Error(ErrorCode::kConfigError,
                  "schedule is missing group '" + std::string(GroupName(g)) +
                      "'");
    }
  }
  if (auto bad = schedule.TriangleViolations(); !bad.empty()) {
    throw Error(ErrorCode::kConfigError,
                "schedule '" + schedule.name() + "': direct -1->+1 cost of " +
                    std::string(GroupName(bad.front())) +
                    " exceeds the two-step route");
  }
  return schedule;
}

CostSchedule LoadSchedule(const std::string& path) {
  return ParseSchedule(internal::ReadFile(path));
}

std::string FormatSchedule(const CostSchedule& schedule) {
  std::ostringstream os;
  os << "name = " << schedule.name() << "\n"
     << "# group = c(-1->0) c(-1->+1) c(0->+1)\n";
  for (FeatureGroup g : kAllGroups) {
    os << GroupName(g) << " =";
    for (Step s : kAllSteps) os << " " << schedule.at(g, s).ToString();
    os << "\n";
  }
  return os.str();
}

CostSchedule ResolveSchedule(const std::string& name_or_path) {
  if (auto builtin = CostSchedule::Builtin(name_or_path)) return *builtin;
  return LoadSchedule(name_or_path);
}

}  // namespace phishcost
