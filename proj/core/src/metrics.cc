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

#include "phishcost/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phishcost/error.h"
#include "phishcost/random.h"

namespace phishcost {
namespace {

void RequireNonEmpty(const MecDistribution& dist) {
  if (dist.n() == 0) {
    throw Error(ErrorCode::kEmptyDistribution, "no MEC values");
  }
}

Rational Fraction(std::size_t num, std::size_t den) {
  return Rational(static_cast<std::int64_t>(num),
                  static_cast<std::int64_t>(den));
}

void RequireBudget(std::int64_t b_max) {
  if (b_max < 1) throw Error(ErrorCode::kConfigError, "b_max must be >= 1");
}

}  // namespace

MecDistribution::MecDistribution(std::vector<Cost> values)
    : values_(std::move(values)) {
  for (const Cost& c : values_) {
    if (c.is_infinite()) {
      ++infinite_count_;
    } else {
      finite_.push_back(c.value());
    }
  }
  std::sort(finite_.begin(), finite_.end());
}

MecDistribution MecDistribution::FromResults(
    std::span<const EvasionResult> results) {
  std::vector<Cost> values;
  values.reserve(results.size());
  for (const EvasionResult& r : results) values.push_back(r.mec);
  return MecDistribution(std::move(values));
}

Rational MecDistribution::NoEvasionFraction() const {
  RequireNonEmpty(*this);
  return Fraction(infinite_count_, n());
}

Rational Survival(const MecDistribution& dist, const Cost& budget) {
  RequireNonEmpty(dist);
  std::size_t above = 0;
  for (const Cost& c : dist.values()) {
    if (c > budget) ++above;
  }
  return Fraction(above, dist.n());
}

std::vector<SurvivalPoint> SurvivalCurve(const MecDistribution& dist,
                                         std::int64_t b_max) {
  RequireNonEmpty(dist);
  std::vector<SurvivalPoint> curve;
  for (std::int64_t b = 0; b <= b_max; ++b) {
    curve.push_back({b, Survival(dist, Cost(b))});
  }
  return curve;
}

Rational Fri(const MecDistribution& dist, std::int64_t b_max) {
  RequireNonEmpty(dist);
  RequireBudget(b_max);
  Rational sum(0);
  for (std::int64_t b = 0; b < b_max; ++b) sum += Survival(dist, Cost(b));
  return sum / Rational(b_max);
}

Rational FriByInstance(const MecDistribution& dist, std::int64_t b_max) {
  RequireNonEmpty(dist);
  RequireBudget(b_max);
  std::int64_t total = 0;
  for (const Cost& c : dist.values()) {
    total += c.is_infinite() ? b_max : std::min(b_max, c.value().Ceil());
  }
  return Rational(total, static_cast<std::int64_t>(dist.n()) * b_max);
}

Rational InterpolatedQuantile(std::span<const Rational> sorted,
                              const Rational& p) {
  if (sorted.empty()) {
    throw Error(ErrorCode::kEmptyDistribution, "quantile of empty sample");
  }
  const Rational h = Rational(static_cast<std::int64_t>(sorted.size()) - 1) * p;
  const std::int64_t lo = h.Floor();
  const auto i = static_cast<std::size_t>(lo);
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + (h - Rational(lo)) * (sorted[i + 1] - sorted[i]);
}

double InterpolatedQuantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) {
    throw Error(ErrorCode::kEmptyDistribution, "quantile of empty sample");
  }
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto i = static_cast<std::size_t>(std::floor(h));
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + (h - static_cast<double>(i)) * (sorted[i + 1] - sorted[i]);
}

Quartiles QuantilesFinite(const MecDistribution& dist) {
  RequireNonEmpty(dist);
  const auto& v = dist.finite_sorted();
  if (v.empty()) {
    throw Error(ErrorCode::kAllInfeasible, "every MEC is infinite");
  }
  return {InterpolatedQuantile(v, Rational(1, 4)),
          InterpolatedQuantile(v, Rational(1, 2)),
          InterpolatedQuantile(v, Rational(3, 4))};
}

Rational ConcentrationStats::Rci(std::size_t k) const {
  if (total_edits == 0) return Rational(0);
  std::size_t top = 0;
  for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
    top += edit_counts[ranking[i]];
  }
  return Fraction(top, total_edits);
}

std::vector<std::size_t> ConcentrationStats::TopK(std::size_t k) const {
  return {ranking.begin(),
          ranking.begin() + static_cast<std::ptrdiff_t>(
                                std::min(k, ranking.size()))};
}

ConcentrationStats Concentration(std::span<const EvasionTrace> traces,
                                 std::size_t dim) {
  ConcentrationStats s;
  s.edit_counts.assign(dim, 0);
  s.first_edit_counts.assign(dim, 0);
  for (const EvasionTrace& t : traces) {
    if (t.edits.empty()) continue;
    ++s.traces;
    for (const Edit& e : t.edits) {
      if (e.feature >= dim) {
        throw Error(ErrorCode::kLengthMismatch, "edit outside schema",
                    e.feature);
      }
      ++s.edit_counts[e.feature];
      ++s.total_edits;
    }
    ++s.first_edit_counts[t.edits.front().feature];
  }
  if (s.traces == 0) {
    throw Error(ErrorCode::kNoSuccessfulTraces, "no nonempty traces");
  }
  s.ranking.resize(dim);
  std::iota(s.ranking.begin(), s.ranking.end(), std::size_t{0});
  std::stable_sort(s.ranking.begin(), s.ranking.end(),
                   [&](std::size_t a, std::size_t b) {
                     return s.edit_counts[a] > s.edit_counts[b];
                   });
  s.top_first_feature = static_cast<std::size_t>(
      std::max_element(s.first_edit_counts.begin(), s.first_edit_counts.end()) -
      s.first_edit_counts.begin());
  s.first_top1 = Fraction(s.first_edit_counts[s.top_first_feature], s.traces);
  return s;
}

ConcentrationStats Concentration(std::span<const EvasionResult> results,
                                 std::size_t dim) {
  std::vector<EvasionTrace> traces;
  for (const EvasionResult& r : results) {
    if (r.trace && !r.trace->edits.empty()) traces.push_back(*r.trace);
  }
  return Concentration(traces, dim);
}

Rational AlphaAtCostFloor(const MecDistribution& dist, const Cost& c_min) {
  RequireNonEmpty(dist);
  std::size_t count = 0;
  for (const Cost& c : dist.values()) {
    if (c.is_finite() && c <= c_min) ++count;
  }
  return Fraction(count, dist.n());
}

Cost DistributionalQuantile(const MecDistribution& dist,
                            const Rational& alpha) {
  RequireNonEmpty(dist);
  std::int64_t rank =
      (alpha * Rational(static_cast<std::int64_t>(dist.n()))).Ceil();
  rank = std::clamp<std::int64_t>(rank, 1, static_cast<std::int64_t>(dist.n()));
  const auto& finite = dist.finite_sorted();
  if (static_cast<std::size_t>(rank) <= finite.size()) {
    return Cost(finite[static_cast<std::size_t>(rank) - 1]);
  }
  return Cost::Infinite();
}

bool CostFloorBoundHolds(const MecDistribution& dist, const Cost& c_min) {
  if (AlphaAtCostFloor(dist, c_min) < Rational(1, 2)) return true;
  return DistributionalQuantile(dist, Rational(1, 2)) <= c_min;
}

std::string StatisticSpec::Name() const {
  switch (kind) {
    case Statistic::kMedianMec:
      return "median_mec";
    case Statistic::kFri:
      return "fri";
    case Statistic::kRci:
      return "rci_" + std::to_string(k);
    case Statistic::kSurvivalAt:
      return "survival_at_" + budget.ToString();
  }
  return "unknown";
}

std::optional<double> EvaluateStatistic(std::span<const EvasionResult> results,
                                        std::size_t dim,
                                        const StatisticSpec& spec) {
  if (results.empty()) return std::nullopt;
  switch (spec.kind) {
    case Statistic::kMedianMec: {
      const MecDistribution dist = MecDistribution::FromResults(results);
      if (dist.finite_sorted().empty()) return std::nullopt;
      return QuantilesFinite(dist).median.ToDouble();
    }
    case Statistic::kFri:
      return Fri(MecDistribution::FromResults(results), spec.b_max).ToDouble();
    case Statistic::kRci: {
      bool any = std::any_of(results.begin(), results.end(),
                             [](const EvasionResult& r) {
                               return r.trace && !r.trace->edits.empty();
                             });
      if (!any) return std::nullopt;
      return Concentration(results, dim).Rci(spec.k).ToDouble();
    }
    case Statistic::kSurvivalAt:
      return Survival(MecDistribution::FromResults(results), spec.budget)
          .ToDouble();
  }
  return std::nullopt;
}

BootstrapCi Bootstrap(std::span<const EvasionResult> results, std::size_t dim,
                      const StatisticSpec& spec, int resamples,
                      std::uint64_t seed) {
  if (results.empty()) {
    throw Error(ErrorCode::kEmptyDistribution, "bootstrap of empty batch");
  }
  const auto point = EvaluateStatistic(results, dim, spec);
  if (!point) {
    throw Error(ErrorCode::kEmptyDistribution,
                spec.Name() + " undefined on this batch");
  }
  BootstrapCi ci;
  ci.statistic = spec.Name();
  ci.point = *point;
  ci.resamples = resamples;
  ci.seed = seed;
  Rng rng(seed);
  const std::size_t n = results.size();
  std::vector<double> stats;
  std::vector<EvasionResult> sample(n);
  for (int r = 0; r < resamples; ++r) {
    for (std::size_t i = 0; i < n; ++i) sample[i] = results[rng.Below(n)];
    if (auto v = EvaluateStatistic(sample, dim, spec)) {
      stats.push_back(*v);
    } else {
      ++ci.skipped;
    }
  }
  if (stats.empty()) {
    ci.lower = ci.upper = ci.point;
    return ci;
  }
  std::sort(stats.begin(), stats.end());
  ci.lower = InterpolatedQuantile(std::span<const double>(stats), 0.025);
  ci.upper = InterpolatedQuantile(std::span<const double>(stats), 0.975);
  return ci;
}

double PopulationStdDev(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / n);
}

TiebreakStability MeasureTiebreakStability(
    const Classifier& model, const CostSchedule& schedule,
    const FeatureSchema& schema,
    std::span<const std::vector<FeatureValue>> instances, const Cost& b_max,
    int n_orders, std::uint64_t seed, unsigned workers) {
  TiebreakStability out;
  std::vector<Cost> reference;
  const AttackerConfig attacker = AttackerConfig::Exact(b_max);
  for (int o = 0; o < n_orders; ++o) {
    const EditOrder order = EditOrder::Shuffled(
        schema.size(), DeriveSeed(seed, static_cast<std::uint64_t>(o)));
    const std::vector<EvasionResult> results = BatchEvaluate(
        model, schedule, schema, instances, attacker, workers, &order);
    std::vector<Cost> mec;
    for (const EvasionResult& r : results) mec.push_back(r.mec);
    if (o == 0) {
      reference = mec;
    } else if (mec != reference) {
      out.mec_identical = false;
    }
    const auto rci = EvaluateStatistic(results, schema.size(),
                                       StatisticSpec{Statistic::kRci, 3});
    out.rci3.push_back(rci.value_or(0.0));
  }
  out.std_dev = PopulationStdDev(out.rci3);
  return out;
}

}  // namespace phishcost
