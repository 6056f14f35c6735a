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

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "oracle.h"
#include "phishcost/error.h"
#include "phishcost/random.h"

namespace phishcost {
namespace {

constexpr FeatureValue kP = FeatureValue::kPhishing;
constexpr FeatureValue kN = FeatureValue::kNeutral;
constexpr FeatureValue kL = FeatureValue::kLegitimate;

MecDistribution Dist(std::initializer_list<Cost> values) {
  return MecDistribution(std::vector<Cost>(values));
}

MecDistribution RandomDist(Rng& rng) {
  std::vector<Cost> v(1 + rng.Below(30));
  for (Cost& c : v) {
    if (rng.Below(5) == 0) {
      c = Cost::Infinite();
    } else {
      c = Cost(Rational(static_cast<std::int64_t>(rng.Below(50)), 2));
    }
  }
  return MecDistribution(std::move(v));
}

EvasionResult Result(std::vector<std::size_t> features) {
  EvasionResult r;
  EvasionTrace t;
  for (std::size_t j : features) t.edits.push_back(Edit{j, kP, kN, Cost(1)});
  t.total = Cost(static_cast<std::int64_t>(features.size()));
  r.mec = t.total;
  r.trace = t;
  return r;
}

TEST(SurvivalTest, StrictInequality) {
  MecDistribution ones = Dist({1, 1, 1});
  EXPECT_EQ(Survival(ones, 0), Rational(1));
  EXPECT_EQ(Survival(ones, 1), Rational(0));
  EXPECT_THROW(Survival(MecDistribution(), 1), Error);
}

TEST(FriTest, Examples) {
  EXPECT_EQ(Fri(Dist({Cost::Infinite(), Cost::Infinite()}), 18), Rational(1));
  EXPECT_EQ(Fri(Dist({1, 1, 1}), 18), Rational(1, 18));
  EXPECT_EQ(FriByInstance(Dist({1, 1, 1}), 18), Rational(1, 18));
}

TEST(SurvivalPropertyTest, MonotoneBoundedAndFriAgrees) {
  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    MecDistribution d = RandomDist(rng);
    std::int64_t b_max = 1 + static_cast<std::int64_t>(rng.Below(25));
    auto curve = SurvivalCurve(d, b_max);
    ASSERT_EQ(curve.size(), static_cast<std::size_t>(b_max + 1));
    for (std::size_t i = 0; i < curve.size(); ++i) {
      EXPECT_EQ(curve[i].budget, static_cast<std::int64_t>(i));
      EXPECT_GE(curve[i].survival, d.NoEvasionFraction());
      if (i > 0) EXPECT_LE(curve[i].survival, curve[i - 1].survival);
    }
    EXPECT_EQ(Fri(d, b_max), FriByInstance(d, b_max));
    EXPECT_GE(Fri(d, b_max), Rational(0));
    EXPECT_LE(Fri(d, b_max), Rational(1));
  }
}

TEST(QuantileTest, Examples) {
  Quartiles q = QuantilesFinite(Dist({1, 2, 3, Cost::Infinite()}));
  EXPECT_EQ(q.median, Rational(2));
  EXPECT_EQ(q.q1, Rational(3, 2));
  EXPECT_EQ(q.q3, Rational(5, 2));
  std::vector<Rational> two = {Rational(2), Rational(3)};
  EXPECT_EQ(InterpolatedQuantile(two, Rational(1, 2)), Rational(5, 2));
  std::vector<double> d = {1.0, 2.0, 4.0};
  EXPECT_DOUBLE_EQ(InterpolatedQuantile(d, 0.75), 3.0);
  try {
    QuantilesFinite(Dist({Cost::Infinite()}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAllInfeasible);
  }
}

TEST(ConcentrationTest, SingleFeature) {
  std::vector<EvasionResult> results = {Result({5}), Result({5, 5}),
                                        Result({5})};
  ConcentrationStats s = Concentration(results, 8);
  EXPECT_EQ(s.Rci(1), Rational(1));
  EXPECT_EQ(s.first_top1, Rational(1));
  EXPECT_EQ(s.top_first_feature, 5u);
  EXPECT_EQ(s.total_edits, 4u);
  EXPECT_EQ(s.traces, 3u);
}

TEST(ConcentrationTest, UniformSpread) {
  std::vector<EvasionResult> results;
  for (std::size_t j = 0; j < 6; ++j) results.push_back(Result({j}));
  ConcentrationStats s = Concentration(results, 6);
  EXPECT_EQ(s.Rci(3), Rational(1, 2));
  EXPECT_EQ(s.TopK(3), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(s.top_first_feature, 0u);
  EXPECT_EQ(s.first_top1, Rational(1, 6));
  EXPECT_EQ(s.Rci(100), Rational(1));
}

TEST(ConcentrationTest, SkipsFailedAndEmptyTraces) {
  EvasionResult failed;
  EvasionResult accepted;
  accepted.mec = Cost(0);
  accepted.trace = EvasionTrace{{}, Cost(0)};
  std::vector<EvasionResult> results = {failed, accepted, Result({2, 1}),
                                        Result({1})};
  ConcentrationStats s = Concentration(results, 3);
  EXPECT_EQ(s.traces, 2u);
  EXPECT_EQ(s.edit_counts, (std::vector<std::size_t>{0, 2, 1}));
  EXPECT_EQ(s.ranking.front(), 1u);
  // Tie in first edits (2 and 1 once each): the lower index wins.
  EXPECT_EQ(s.top_first_feature, 1u);
}

TEST(CostFloorTest, Examples) {
  EXPECT_EQ(AlphaAtCostFloor(Dist({1, 1, 1}), 1), Rational(1));
  EXPECT_EQ(AlphaAtCostFloor(Dist({1, 2, Cost::Infinite(), 1}), 1),
            Rational(1, 2));
  EXPECT_EQ(DistributionalQuantile(Dist({3, 1, Cost::Infinite()}),
                                   Rational(1, 2)),
            Cost(3));
  EXPECT_TRUE(DistributionalQuantile(
                  Dist({1, Cost::Infinite(), Cost::Infinite()}), Rational(1, 2))
                  .is_infinite());
}

// Smallest value v with at least ceil(alpha n) members <= v.
Cost BruteQuantile(const MecDistribution& d, const Rational& alpha) {
  std::vector<Cost> all = d.values();
  std::int64_t need = std::max<std::int64_t>(
      1, (alpha * Rational(static_cast<std::int64_t>(d.n()))).Ceil());
  Cost best = Cost::Infinite();
  for (const Cost& v : all) {
    if (v.is_infinite()) continue;
    std::int64_t count = std::count_if(
        all.begin(), all.end(), [&](const Cost& c) { return c <= v; });
    if (count >= need && v < best) best = v;
  }
  return best;
}

TEST(CostFloorPropertyTest, BoundAlwaysHoldsAndQuantileMatches) {
  Rng rng(8);
  for (int trial = 0; trial < 1000; ++trial) {
    MecDistribution d = RandomDist(rng);
    Cost c_min(Rational(static_cast<std::int64_t>(rng.Below(6)) + 1, 2));
    EXPECT_TRUE(CostFloorBoundHolds(d, c_min));
    for (Rational a : {Rational(1, 4), Rational(1, 2), Rational(3, 4)}) {
      EXPECT_EQ(DistributionalQuantile(d, a), BruteQuantile(d, a));
    }
    if (AlphaAtCostFloor(d, c_min) >= Rational(1, 2)) {
      EXPECT_LE(DistributionalQuantile(d, Rational(1, 2)), c_min);
    }
  }
}

TEST(BootstrapTest, DegenerateStatistic) {
  std::vector<EvasionResult> results(20, Result({0, 1}));
  BootstrapCi ci = Bootstrap(results, 2, StatisticSpec{Statistic::kMedianMec},
                             200, 1);
  EXPECT_DOUBLE_EQ(ci.point, 2.0);
  EXPECT_DOUBLE_EQ(ci.lower, 2.0);
  EXPECT_DOUBLE_EQ(ci.upper, 2.0);
  EXPECT_EQ(ci.statistic, "median_mec");
}

TEST(BootstrapTest, ContainsPointAndIsSeeded) {
  Rng rng(12);
  std::vector<EvasionResult> results;
  for (int i = 0; i < 80; ++i) {
    std::vector<std::size_t> f;
    for (std::size_t k = 0, n = 1 + rng.Below(3); k < n; ++k) {
      f.push_back(rng.Below(6));
    }
    results.push_back(Result(f));
  }
  for (StatisticSpec spec :
       {StatisticSpec{Statistic::kFri}, StatisticSpec{Statistic::kRci, 3},
        StatisticSpec{Statistic::kMedianMec},
        StatisticSpec{Statistic::kSurvivalAt, 3, Cost(2)}}) {
    BootstrapCi a = Bootstrap(results, 6, spec, 200, 5);
    BootstrapCi b = Bootstrap(results, 6, spec, 200, 5);
    EXPECT_LE(a.lower, a.point) << spec.Name();
    EXPECT_GE(a.upper, a.point) << spec.Name();
    EXPECT_DOUBLE_EQ(a.lower, b.lower);
    EXPECT_DOUBLE_EQ(a.upper, b.upper);
    EXPECT_EQ(a.resamples, 200);
  }
  EXPECT_EQ((StatisticSpec{Statistic::kSurvivalAt, 3, Cost(2)}).Name(),
            "survival_at_2");
}

TEST(TiebreakTest, UniquePathsGiveZeroSpread) {
  FeatureSchema schema({{"a", FeatureGroup::kSurface, ValueSet::Ternary()},
                        {"b", FeatureGroup::kSemiDomain, ValueSet::Ternary()}});
  testing::AllLegitimate model({0});
  std::vector<std::vector<FeatureValue>> xs = {{kP, kP}, {kN, kP}};
  TiebreakStability s = MeasureTiebreakStability(
      model, CostSchedule::Base(), schema, xs, 18, 5, 1);
  EXPECT_EQ(s.rci3.size(), 5u);
  EXPECT_DOUBLE_EQ(s.std_dev, 0.0);
  EXPECT_TRUE(s.mec_identical);
}

TEST(TiebreakTest, SymmetricPathsKeepMec) {
  // Accepted once any two of four surface features reach +1: many optimal
  // paths exist, so edit identities depend on the order but MEC does not.
  FeatureSchema schema({{"a", FeatureGroup::kSurface, ValueSet::Ternary()},
                        {"b", FeatureGroup::kSurface, ValueSet::Ternary()},
                        {"c", FeatureGroup::kSurface, ValueSet::Ternary()},
                        {"d", FeatureGroup::kSurface, ValueSet::Ternary()}});
  class TwoOfFour final : public Classifier {
   public:
    double PredictProba(std::span<const FeatureValue> x) const override {
      int up = 0;
      for (FeatureValue v : x) up += v == kL;
      return up >= 2 ? 1.0 : 0.0;
    }
  } model;
  std::vector<std::vector<FeatureValue>> xs = {{kP, kP, kP, kP},
                                               {kN, kN, kN, kN}};
  TiebreakStability s = MeasureTiebreakStability(
      model, CostSchedule::Base(), schema, xs, 18, 10, 3);
  EXPECT_TRUE(s.mec_identical);
  EXPECT_DOUBLE_EQ(s.std_dev, PopulationStdDev(s.rci3));
  for (double r : s.rci3) {
    EXPECT_GE(r, 0.5);
    EXPECT_LE(r, 1.0);
  }
}

TEST(PopulationStdDevTest, Examples) {
  std::vector<double> v = {1.0, 3.0};
  EXPECT_DOUBLE_EQ(PopulationStdDev(v), 1.0);
  std::vector<double> one = {4.0};
  EXPECT_DOUBLE_EQ(PopulationStdDev(one), 0.0);
}

}  // namespace
}  // namespace phishcost
