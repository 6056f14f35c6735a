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

#ifndef PHISHCOST_MODEL_H_
#define PHISHCOST_MODEL_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phishcost/dataset.h"
#include "phishcost/feature_schema.h"

namespace phishcost {

// Anything that scores a feature vector. Implementations must be safe for
// concurrent PredictProba calls.
class Classifier {
 public:
  virtual ~Classifier() = default;

  // Probability of the legitimate (+1) class, in [0, 1].
  virtual double PredictProba(std::span<const FeatureValue> x) const = 0;

  // +1 iff PredictProba(x) >= 0.5.
  Label Predict(std::span<const FeatureValue> x) const {
    return PredictProba(x) >= 0.5 ? Label::kLegitimate : Label::kPhishing;
  }
};

enum class ModelFamily : std::uint8_t {
  kLogistic,
  kRandomForest,
  kGradientBoosting,
  // Second-order (Newton) boosting standing in for XGBoost.
  kGradientBoostingVariant,
};

inline constexpr ModelFamily kAllFamilies[] = {
    ModelFamily::kLogistic, ModelFamily::kRandomForest,
    ModelFamily::kGradientBoosting, ModelFamily::kGradientBoostingVariant};

// "logistic", "random_forest", "gbdt", "gbdt_newton".
std::string_view FamilyName(ModelFamily family);
// Short labels used in tables: "Logit", "RF", "GBDT", "XGB".
std::string_view FamilyLabel(ModelFamily family);
// Accepts FamilyName, FamilyLabel and a few aliases, case-insensitive.
std::optional<ModelFamily> ParseFamily(std::string_view text);

struct LogisticParams {
  double c = 1.0;  // inverse L2 strength; the intercept is unpenalized
  double tolerance = 1e-10;
  int max_iterations = 100;
};

struct ForestParams {
  int trees = 100;
  int max_depth = 10;
  // 0 selects floor(sqrt(d)).
  int max_features = 0;
  int min_samples_split = 2;
  int min_samples_leaf = 1;
};

struct BoostingParams {
  int estimators = 100;
  double learning_rate = 0.1;
  int max_depth = 6;
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  // Newton variant only.
  double l2 = 1.0;
  double min_child_weight = 1.0;
};

struct ModelSpec {
  ModelFamily family = ModelFamily::kLogistic;
  LogisticParams logistic;
  ForestParams forest;
  BoostingParams boosting;
  std::uint64_t seed = 0;

  static ModelSpec Default(ModelFamily family, std::uint64_t seed = 0);
};

// Axis-aligned tree over ternary features; x[feature] <= threshold goes left.
struct Tree {
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    std::int8_t threshold = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;
  };
  std::vector<Node> nodes;

  double Eval(std::span<const FeatureValue> x) const {
    std::int32_t i = 0;
    while (nodes[i].feature >= 0) {
      const Node& n = nodes[i];
      i = ToInt(x[n.feature]) <= n.threshold ? n.left : n.right;
    }
    return nodes[i].value;
  }
  int Depth() const;
};

// Immutable fitted model bound to the schema it was trained on.
class TrainedModel final : public Classifier {
 public:
  TrainedModel() = default;

  // Logistic model with explicit parameters.
  static TrainedModel Logistic(std::shared_ptr<const FeatureSchema> schema,
                               std::vector<double> weights, double bias);
  // Probability = mean of tree outputs.
  static TrainedModel Forest(std::shared_ptr<const FeatureSchema> schema,
                             std::vector<Tree> trees);
  // Probability = sigmoid(base + scale * sum of tree outputs).
  static TrainedModel Boosted(ModelFamily family,
                              std::shared_ptr<const FeatureSchema> schema,
                              std::vector<Tree> trees, double base_margin,
                              double scale);

  ModelFamily family() const { return family_; }
  const FeatureSchema& schema() const { return *schema_; }
  const std::shared_ptr<const FeatureSchema>& schema_ptr() const {
    return schema_;
  }
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  const std::vector<Tree>& trees() const { return trees_; }

  // Throws kSchemaMismatch when x has the wrong dimension.
  double PredictProba(std::span<const FeatureValue> x) const override;
  // Also checks that x is bound to an equal schema.
  double PredictProba(const FeatureVector& x) const;

  std::string ToJson() const;
  // Refuses (kSchemaMismatch) a model whose schema hash differs.
  static TrainedModel FromJson(std::string_view text,
                               std::shared_ptr<const FeatureSchema> schema);

 private:
  ModelFamily family_ = ModelFamily::kLogistic;
  std::shared_ptr<const FeatureSchema> schema_;
  std::vector<double> weights_;
  double bias_ = 0.0;
  std::vector<Tree> trees_;
  double base_margin_ = 0.0;
  double scale_ = 1.0;
};

// Deterministic in (spec, data). Throws kDegenerateData on a single class.
TrainedModel Train(const ModelSpec& spec, const LabeledDataset& train);

struct IIDMetrics {
  double accuracy = 0.0;
  double auc = 0.0;
  double phishing_tpr = 0.0;
};

// Both classes must be present (kDegenerateData otherwise).
IIDMetrics EvaluateIid(const Classifier& model, const LabeledDataset& test);

// Probability that a random legitimate-labelled score exceeds a random
// phishing-labelled one, ties counted one half.
double Auc(std::span<const double> scores, std::span<const Label> labels);

double Sigmoid(double z);

}  // namespace phishcost

#endif  // PHISHCOST_MODEL_H_
