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

#ifndef PHISHCOST_METRICS_H_
#define PHISHCOST_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phishcost/cost.h"
#include "phishcost/cost_model.h"
#include "phishcost/evasion.h"
#include "phishcost/feature_schema.h"
#include "phishcost/model.h"

namespace phishcost {

// MEC values of one evaluated batch, in instance order.
class MecDistribution {
 public:
  MecDistribution() = default;
  explicit MecDistribution(std::vector<Cost> values);
  static MecDistribution FromResults(std::span<const EvasionResult> results);

  std::size_t n() const { return values_.size(); }
  std::size_t infinite_count() const { return infinite_count_; }
  const std::vector<Cost>& values() const { return values_; }
  // Finite values, ascending.
  const std::vector<Rational>& finite_sorted() const { return finite_; }
  // infinite_count / n. Throws kEmptyDistribution when n = 0.
  Rational NoEvasionFraction() const;

 private:
  std::vector<Cost> values_;
  std::vector<Rational> finite_;
  std::size_t infinite_count_ = 0;
};

// Fraction of instances with mec > budget. Throws kEmptyDistribution.
Rational Survival(const MecDistribution& dist, const Cost& budget);

struct SurvivalPoint {
  std::int64_t budget = 0;
  Rational survival;
};

// S(B) for B = 0, 1, ..., b_max.
std::vector<SurvivalPoint> SurvivalCurve(const MecDistribution& dist,
                                         std::int64_t b_max);

// Left Riemann sum (1 / b_max) * sum_{B=0}^{b_max-1} S(B), counting per
// budget. Throws kEmptyDistribution, kConfigError for b_max < 1.
Rational Fri(const MecDistribution& dist, std::int64_t b_max);
// The same quantity summed per instance: each instance contributes the
// number of integer budgets below its mec, capped at b_max.
Rational FriByInstance(const MecDistribution& dist, std::int64_t b_max);

// Type-7 (linear interpolation) quantile of an ascending sample, p in [0,1].
Rational InterpolatedQuantile(std::span<const Rational> sorted,
                              const Rational& p);
double InterpolatedQuantile(std::span<const double> sorted, double p);

struct Quartiles {
  Rational q1;
  Rational median;
  Rational q3;
};

// Over finite values only. Throws kAllInfeasible (or kEmptyDistribution).
Quartiles QuantilesFinite(const MecDistribution& dist);

struct ConcentrationStats {
  // Edits touching each feature across all traces.
  std::vector<std::size_t> edit_counts;
  std::size_t total_edits = 0;
  // Features by descending edit count, ascending index on ties.
  std::vector<std::size_t> ranking;
  // First-edit feature counts and the modal one (lowest index on ties).
  std::vector<std::size_t> first_edit_counts;
  std::size_t top_first_feature = 0;
  std::size_t traces = 0;
  Rational first_top1;

  // Share of edits on the k most edited features; k is clamped to d.
  Rational Rci(std::size_t k) const;
  std::vector<std::size_t> TopK(std::size_t k) const;
};

// Throws kNoSuccessfulTraces when no nonempty trace is given. Empty traces
// are ignored.
ConcentrationStats Concentration(std::span<const EvasionTrace> traces,
                                 std::size_t dim);
// Uses the nonempty traces of the results.
ConcentrationStats Concentration(std::span<const EvasionResult> results,
                                 std::size_t dim);

// Fraction of all n instances with finite mec <= c_min.
Rational AlphaAtCostFloor(const MecDistribution& dist, const Cost& c_min);

// The ceil(alpha * n)-th smallest mec with infinities ordered last (the
// smallest for alpha = 0).
Cost DistributionalQuantile(const MecDistribution& dist, const Rational& alpha);

// True unless alpha_hat >= 1/2 while the distributional median exceeds
// c_min.
bool CostFloorBoundHolds(const MecDistribution& dist, const Cost& c_min);

enum class Statistic { kMedianMec, kFri, kRci, kSurvivalAt };

struct StatisticSpec {
  Statistic kind = Statistic::kFri;
  std::size_t k = 3;            // kRci
  Cost budget{2};               // kSurvivalAt
  std::int64_t b_max = 18;      // kFri

  // "median_mec", "fri", "rci_3", "survival_at_2".
  std::string Name() const;
};

// Statistic value for the batch; nullopt when undefined (no finite mec for
// the median, no successful trace for RCI).
std::optional<double> EvaluateStatistic(std::span<const EvasionResult> results,
                                        std::size_t dim,
                                        const StatisticSpec& spec);

struct BootstrapCi {
  std::string statistic;
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int resamples = 0;
  // Resamples where the statistic was undefined and skipped.
  int skipped = 0;
  std::uint64_t seed = 0;
};

// Percentile bootstrap over instances: 2.5 / 97.5 type-7 percentiles of the
// resampled statistic. Throws kEmptyDistribution for an empty batch and
// when the point statistic is undefined.
BootstrapCi Bootstrap(std::span<const EvasionResult> results, std::size_t dim,
                      const StatisticSpec& spec, int resamples,
                      std::uint64_t seed);

struct TiebreakStability {
  std::vector<double> rci3;
  double std_dev = 0.0;
  // Every order produced the same MEC for every instance.
  bool mec_identical = true;
};

// Re-runs the exact search under n_orders seeded edit orders and reports
// the population standard deviation of RCI_3.
TiebreakStability MeasureTiebreakStability(
    const Classifier& model, const CostSchedule& schedule,
    const FeatureSchema& schema,
    std::span<const std::vector<FeatureValue>> instances, const Cost& b_max,
    int n_orders, std::uint64_t seed, unsigned workers = 1);

double PopulationStdDev(std::span<const double> values);

}  // namespace phishcost

#endif  // PHISHCOST_METRICS_H_
