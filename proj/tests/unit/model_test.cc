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

#include "phishcost/model.h"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "phishcost/dataset.h"
#include "phishcost/error.h"
#include "phishcost/random.h"
#include "synthetic.h"

namespace phishcost {
namespace {

constexpr FeatureValue kP = FeatureValue::kPhishing;
constexpr FeatureValue kN = FeatureValue::kNeutral;
constexpr FeatureValue kL = FeatureValue::kLegitimate;

std::shared_ptr<const FeatureSchema> Ternary(std::size_t d) {
  std::vector<FeatureSpec> specs;
  for (std::size_t j = 0; j < d; ++j) {
    specs.push_back({"f" + std::to_string(j), FeatureGroup::kSurface,
                     ValueSet::Ternary()});
  }
  return std::make_shared<const FeatureSchema>(std::move(specs));
}

// Mann-Whitney statistic by comparing every positive with every negative.
double PairwiseAuc(const std::vector<double>& scores,
                   const std::vector<Label>& labels) {
  double wins = 0;
  double pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != Label::kLegitimate) continue;
    for (std::size_t k = 0; k < scores.size(); ++k) {
      if (labels[k] != Label::kPhishing) continue;
      pairs += 1;
      if (scores[i] > scores[k]) wins += 1;
      if (scores[i] == scores[k]) wins += 0.5;
    }
  }
  return wins / pairs;
}

const LabeledDataset& Synthetic() {
  static const LabeledDataset data =
      testing::SyntheticUci(testing::SyntheticOptions{1500, 3, 0.03});
  return data;
}

TEST(AucTest, Examples) {
  std::vector<Label> labels = {Label::kPhishing, Label::kPhishing,
                               Label::kLegitimate, Label::kLegitimate};
  std::vector<double> separated = {0.1, 0.2, 0.8, 0.9};
  EXPECT_DOUBLE_EQ(Auc(separated, labels), 1.0);
  std::vector<double> tied = {0.5, 0.5, 0.5, 0.5};
  EXPECT_DOUBLE_EQ(Auc(tied, labels), 0.5);
}

TEST(AucTest, MatchesPairwiseCount) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 2 + rng.Below(40);
    std::vector<double> scores(n);
    std::vector<Label> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(rng.Below(6)) / 5.0;
      labels[i] = rng.Below(2) ? Label::kLegitimate : Label::kPhishing;
    }
    labels[0] = Label::kLegitimate;
    labels[1] = Label::kPhishing;
    EXPECT_NEAR(Auc(scores, labels), PairwiseAuc(scores, labels), 1e-12);
  }
}

TEST(PredictTest, ZeroLogisticIsHalf) {
  TrainedModel m = TrainedModel::Logistic(Ternary(3), {0, 0, 0}, 0);
  std::vector<FeatureValue> x = {kP, kN, kL};
  EXPECT_DOUBLE_EQ(m.PredictProba(x), 0.5);
  EXPECT_EQ(m.Predict(x), Label::kLegitimate);
}

TEST(PredictTest, SingleTreeForestReturnsLeafFraction) {
  Tree tree;
  tree.nodes.resize(3);
  tree.nodes[0].feature = 0;
  tree.nodes[0].threshold = 0;
  tree.nodes[0].left = 1;
  tree.nodes[0].right = 2;
  tree.nodes[1].value = 0.75;
  tree.nodes[2].value = 0.25;
  TrainedModel m = TrainedModel::Forest(Ternary(1), {tree});
  std::vector<FeatureValue> x = {kN};
  EXPECT_DOUBLE_EQ(m.PredictProba(x), 0.75);
  std::vector<FeatureValue> y = {kL};
  EXPECT_DOUBLE_EQ(m.PredictProba(y), 0.25);
}

TEST(PredictTest, WrongDimensionIsSchemaMismatch) {
  TrainedModel m = TrainedModel::Logistic(Ternary(2), {1, 1}, 0);
  std::vector<FeatureValue> x = {kP};
  try {
    m.PredictProba(x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaMismatch);
  }
}

TEST(TrainTest, LogisticSeparatesToy) {
  auto schema = Ternary(2);
  LabeledDataset data(schema, {kP, kP, kP, kL, kL, kP, kL, kL},
                      {Label::kPhishing, Label::kPhishing, Label::kLegitimate,
                       Label::kLegitimate});
  ModelSpec spec = ModelSpec::Default(ModelFamily::kLogistic);
  spec.logistic.c = 100.0;
  TrainedModel m = Train(spec, data);
  EXPECT_DOUBLE_EQ(EvaluateIid(m, data).accuracy, 1.0);
}

TEST(TrainTest, BoostingLearnsSignOfSingleFeature) {
  auto schema = std::make_shared<const FeatureSchema>(std::vector<FeatureSpec>{
      {"f", FeatureGroup::kSurface, ValueSet::Of({kP, kL})}});
  std::vector<FeatureValue> values;
  std::vector<Label> labels;
  for (int i = 0; i < 40; ++i) {
    bool legit = i % 3 == 0;
    values.push_back(legit ? kL : kP);
    labels.push_back(legit ? Label::kLegitimate : Label::kPhishing);
  }
  LabeledDataset data(schema, values, labels);
  for (ModelFamily f : kAllFamilies) {
    TrainedModel m = Train(ModelSpec::Default(f, 1), data);
    EXPECT_DOUBLE_EQ(EvaluateIid(m, data).accuracy, 1.0) << FamilyName(f);
  }
}

TEST(TrainTest, ProbabilitiesInRangeAndDeterministic) {
  const LabeledDataset& data = Synthetic();
  for (ModelFamily f : kAllFamilies) {
    ModelSpec spec = ModelSpec::Default(f, 5);
    if (f != ModelFamily::kLogistic) {
      spec.forest.trees = 20;
      spec.boosting.estimators = 20;
    }
    TrainedModel a = Train(spec, data);
    TrainedModel b = Train(spec, data);
    EXPECT_EQ(a.ToJson(), b.ToJson()) << FamilyName(f);
    for (std::size_t i = 0; i < data.size(); i += 7) {
      double p = a.PredictProba(data.row(i));
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
    EXPECT_GT(EvaluateIid(a, data).auc, 0.8) << FamilyName(f);
  }
}

TEST(TrainTest, TreesRespectDepthLimit) {
  ModelSpec spec = ModelSpec::Default(ModelFamily::kRandomForest, 2);
  spec.forest.trees = 5;
  spec.forest.max_depth = 3;
  TrainedModel m = Train(spec, Synthetic());
  EXPECT_EQ(m.trees().size(), 5u);
  for (const Tree& t : m.trees()) EXPECT_LE(t.Depth(), 3);
}

TEST(TrainTest, RejectsSingleClassAndBadParams) {
  auto schema = Ternary(1);
  LabeledDataset one(schema, {kP, kN}, {Label::kPhishing, Label::kPhishing});
  try {
    Train(ModelSpec::Default(ModelFamily::kLogistic), one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateData);
  }
  ModelSpec bad = ModelSpec::Default(ModelFamily::kRandomForest);
  bad.forest.trees = 0;
  try {
    Train(bad, Synthetic());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
  }
}

TEST(ModelJsonTest, RoundTripPreservesPredictions) {
  const LabeledDataset& data = Synthetic();
  for (ModelFamily f : kAllFamilies) {
    ModelSpec spec = ModelSpec::Default(f, 9);
    spec.forest.trees = 10;
    spec.boosting.estimators = 10;
    TrainedModel m = Train(spec, data);
    TrainedModel back = TrainedModel::FromJson(m.ToJson(), data.schema_ptr());
    EXPECT_EQ(back.family(), f);
    for (std::size_t i = 0; i < data.size(); i += 11) {
      EXPECT_DOUBLE_EQ(back.PredictProba(data.row(i)),
                       m.PredictProba(data.row(i)));
    }
  }
}

TEST(ModelJsonTest, RefusesOtherSchema) {
  TrainedModel m = TrainedModel::Logistic(Ternary(2), {1, 1}, 0);
  try {
    TrainedModel::FromJson(m.ToJson(), Ternary(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaMismatch);
  }
}

TEST(FamilyTest, NamesRoundTrip) {
  for (ModelFamily f : kAllFamilies) {
    EXPECT_EQ(ParseFamily(FamilyName(f)), f);
  }
  EXPECT_FALSE(ParseFamily("svm").has_value());
}

TEST(SigmoidTest, StableAtExtremes) {
  EXPECT_DOUBLE_EQ(Sigmoid(0), 0.5);
  EXPECT_GT(Sigmoid(800), 0.999);
  EXPECT_LT(Sigmoid(-800), 1e-300 + 1e-12);
  EXPECT_FALSE(std::isnan(Sigmoid(-1e308)));
}

}  // namespace
}  // namespace phishcost
