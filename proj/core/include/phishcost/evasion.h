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

#ifndef PHISHCOST_EVASION_H_
#define PHISHCOST_EVASION_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "phishcost/cost.h"
#include "phishcost/cost_model.h"
#include "phishcost/feature_schema.h"
#include "phishcost/model.h"

namespace phishcost {

struct Edit {
  std::size_t feature = 0;
  FeatureValue from = FeatureValue::kPhishing;
  FeatureValue to = FeatureValue::kLegitimate;
  Cost cost;

  friend bool operator==(const Edit&, const Edit&) = default;
};

struct EvasionTrace {
  std::vector<Edit> edits;
  Cost total;
};

struct EvasionResult {
  Cost mec = Cost::Infinite();
  // Present iff mec is finite; empty when the source is already accepted.
  std::optional<EvasionTrace> trace;
  // States popped from the frontier (exact) or successors queried (greedy).
  std::uint64_t expanded_nodes = 0;
};

// Order in which single edits compare when cost and path length tie. The
// default is lexicographic by (feature, target value); Shuffled gives a
// seeded random total order on the same edit alphabet.
class EditOrder {
 public:
  static EditOrder Lexicographic(std::size_t dim);
  static EditOrder Shuffled(std::size_t dim, std::uint64_t seed);

  // Rank of the edit moving `feature` to `to` (to is 0 or +1).
  std::uint16_t rank(std::size_t feature, FeatureValue to) const {
    return ranks_[feature * 2 + (to == FeatureValue::kLegitimate ? 1 : 0)];
  }
  std::size_t dim() const { return ranks_.size() / 2; }

 private:
  std::vector<std::uint16_t> ranks_;
};

struct ExactAttack {};
struct GreedyAttack {
  std::int64_t query_budget = 100;
};

struct AttackerConfig {
  std::variant<ExactAttack, GreedyAttack> mode;
  Cost b_max{18};

  static AttackerConfig Exact(Cost b_max = Cost(18));
  static AttackerConfig Greedy(std::int64_t query_budget,
                               Cost b_max = Cost(18));
  bool is_exact() const { return std::holds_alternative<ExactAttack>(mode); }
  // "exact" or "greedy-Q<budget>".
  std::string Name() const;
};

// Largest dimension the exact search supports (states are packed two bits
// per coordinate into 64 bits).
inline constexpr std::size_t kMaxSearchDim = 32;

// Minimal evasion cost by uniform-cost search over the monotone edit lattice.
// Frontier priority is (cost, path length, edit sequence under `order`);
// each state is expanded at most once and the goal test happens on pop.
// Throws kConfigError when b_max is infinite or the schema is too wide,
// kLengthMismatch / kInadmissibleValue for an invalid x.
EvasionResult MecExact(const Classifier& model, const CostSchedule& schedule,
                       const FeatureSchema& schema,
                       std::span<const FeatureValue> x, const Cost& b_max,
                       const EditOrder* order = nullptr);

// Query-limited greedy attacker. Every PredictProba call, including the
// initial check of x, spends one query. Each round scans the affordable
// successors in AdmissibleEdits order; the cheapest accepted successor (first
// on ties) ends the attack, otherwise the edit with the largest probability
// gain per unit cost (first on ties) is applied. The attack fails with an
// infinite cost when queries run out, no affordable edit remains, or the
// query budget is not positive.
EvasionResult MecGreedy(const Classifier& model, const CostSchedule& schedule,
                        const FeatureSchema& schema,
                        std::span<const FeatureValue> x, const Cost& b_max,
                        std::int64_t query_budget);

EvasionResult Evade(const Classifier& model, const CostSchedule& schedule,
                    const FeatureSchema& schema,
                    std::span<const FeatureValue> x,
                    const AttackerConfig& attacker,
                    const EditOrder* order = nullptr);

// Evaluates every instance with `workers` threads (0 = hardware
// concurrency). Result i belongs to instance i regardless of scheduling.
std::vector<EvasionResult> BatchEvaluate(
    const Classifier& model, const CostSchedule& schedule,
    const FeatureSchema& schema,
    std::span<const std::vector<FeatureValue>> instances,
    const AttackerConfig& attacker, unsigned workers = 1,
    const EditOrder* order = nullptr);

// Runs fn(i) for i in [0, n) on a bounded pool; exceptions are rethrown
// (lowest index first) after all workers stop.
void ParallelFor(std::size_t n, unsigned workers,
                 const std::function<void(std::size_t)>& fn);

// Applies the edits in order and returns the resulting vector.
std::vector<FeatureValue> ApplyTrace(std::span<const FeatureValue> x,
                                     const EvasionTrace& trace);

// One JSON object (no trailing newline):
// {"instance_id", "mec", "trace": [{"j", "feature_name", "from", "to",
// "cost"}], "expanded_nodes"}. "trace" is null when mec is infinite.
std::string TraceJsonLine(std::size_t instance_id, const EvasionResult& result,
                          const FeatureSchema& schema);

}  // namespace phishcost

#endif  // PHISHCOST_EVASION_H_
