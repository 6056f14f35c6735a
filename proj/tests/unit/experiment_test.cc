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

#include "phishcost/experiment.h"

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "phishcost/error.h"
#include "synthetic.h"

namespace phishcost {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

ExperimentConfig SmallConfig() {
  ExperimentConfig c;
  c.dataset = "synthetic";
  c.feature_sets = {"Full", "RA-8"};
  c.n_eval = 40;
  c.bootstrap_resamples = 20;
  c.tiebreak_orders = 3;
  c.query_cells = {{"Full", "base"}};
  c.sensitivity.feature_sets = {"Full"};
  c.sensitivity.noise_draws = 2;
  return c;
}

const LabeledDataset& Data() {
  static const LabeledDataset data =
      testing::SyntheticUci(testing::SyntheticOptions{1600, 21, 0.03});
  return data;
}

TEST(ConfigTest, RoundTripsThroughJson) {
  ExperimentConfig c = SmallConfig();
  c.sensitivity.semi_domain_scales = {Rational(1, 3)};
  std::string json = ExperimentConfigJson(c);
  ExperimentConfig back = ParseExperimentConfig(json);
  EXPECT_EQ(ExperimentConfigJson(back), json);
  EXPECT_EQ(ConfigHash(back), ConfigHash(c));
  c.n_eval = 41;
  EXPECT_NE(ConfigHash(c), ConfigHash(back));
}

TEST(ConfigTest, AcceptsManifestAndPartialObjects) {
  ExperimentConfig c =
      ParseExperimentConfig(R"({"format": "phishcost.manifest",
                                "config": {"n_eval": 12, "b_max": 9}})");
  EXPECT_EQ(c.n_eval, 12u);
  EXPECT_EQ(c.b_max, 9);
  EXPECT_EQ(c.feature_sets.size(), 6u);
}

TEST(ConfigTest, RejectsBadInput) {
  EXPECT_EQ(CodeOf([] { ParseExperimentConfig(R"({"n_evals": 3})"); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([] { ParseExperimentConfig("{"); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([] { ParseExperimentConfig(R"({"models": ["svm"]})"); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([] { ParseExperimentConfig(R"({"b_max": 0})"); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([] { CellSelector::Parse("Full"); }),
            ErrorCode::kConfigError);
}

TEST(ExperimentTest, UnknownFeatureSetIsConfigError) {
  ExperimentConfig c = SmallConfig();
  c.feature_sets = {"Nope"};
  EXPECT_EQ(CodeOf([&] { Experiment(c, Data()); }), ErrorCode::kConfigError);
}

TEST(ExperimentTest, GridIsDeterministicAcrossWorkers) {
  Experiment one(SmallConfig(), Data(), 1);
  Experiment many(SmallConfig(), Data(), 4);
  GridReport a = one.RunMainGrid();
  GridReport b = many.RunMainGrid();
  EXPECT_FALSE(a.partial());
  EXPECT_EQ(a.cells.size(), 2u * 2u * 4u);
  EXPECT_EQ(GridJson(one, a), GridJson(many, b));
}

TEST(ExperimentTest, GridCellsSatisfyInvariants) {
  Experiment exp(SmallConfig(), Data(), 2);
  GridReport grid = exp.RunMainGrid();
  for (const CellReport& cell : grid.cells) {
    ASSERT_FALSE(cell.error.has_value()) << cell.Key() << ": " << *cell.error;
    const CellMetrics& m = cell.metrics;
    EXPECT_EQ(m.n, 40u);
    EXPECT_EQ(m.fri, m.fri_by_instance) << cell.Key();
    EXPECT_TRUE(m.cost_floor_bound_holds) << cell.Key();
    EXPECT_EQ(m.survival.size(), 19u);
    for (std::size_t b = 1; b < m.survival.size(); ++b) {
      EXPECT_LE(m.survival[b].survival, m.survival[b - 1].survival);
      EXPECT_GE(m.survival[b].survival, m.noev);
    }
    for (const BootstrapCi& ci : m.cis) {
      EXPECT_LE(ci.lower, ci.point + 1e-12) << cell.Key() << " " << ci.statistic;
      EXPECT_GE(ci.upper, ci.point - 1e-12) << cell.Key() << " " << ci.statistic;
    }
    for (const EvasionResult& r : cell.results) {
      EXPECT_NE(r.mec, Cost(0)) << "sample holds an accepted instance";
    }
    if (cell.tiebreak) {
      EXPECT_TRUE(cell.tiebreak->mec_identical) << cell.Key();
      EXPECT_EQ(cell.tiebreak->rci3.size(), 3u);
    }
  }
}

TEST(ExperimentTest, SensitivityIdentityReproducesGrid) {
  Experiment exp(SmallConfig(), Data());
  SensitivityReport s = exp.RunSensitivity();
  bool found = false;
  for (const PerturbationRow& row : s.rows) {
    if (row.kind != "surface_scale" || row.perturbation != "scale(surface,1)") {
      continue;
    }
    found = true;
    MecDistribution dist = MecDistribution::FromResults(
        exp.ExactResults(row.feature_set, "base", row.model));
    ASSERT_TRUE(row.median.has_value());
    EXPECT_EQ(*row.median, QuantilesFinite(dist).median);
    EXPECT_EQ(row.noev, dist.NoEvasionFraction());
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(s.noise.size(), 4u);
}

TEST(ExperimentTest, GreedyRowsDominateExact) {
  Experiment exp(SmallConfig(), Data());
  QueryBudgetReport q = exp.RunQueryBudget();
  EXPECT_EQ(q.rows.size(), 4u * 4u);
  for (const QueryBudgetRow& row : q.rows) {
    EXPECT_TRUE(row.dominates_exact) << row.attacker;
  }
}

TEST(ExperimentTest, StratifiedCoversSample) {
  Experiment exp(SmallConfig(), Data());
  StratifiedReport r = exp.RunStratified();
  std::size_t pooled = 0;
  for (const Stratum& s : r.strata) {
    if (s.model == "pooled") pooled += s.n;
  }
  EXPECT_EQ(pooled, 4u * 40u);
}

}  // namespace
}  // namespace phishcost
