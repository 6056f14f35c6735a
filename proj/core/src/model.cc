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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include <nlohmann/json.hpp>

#include "internal.h"
#include "phishcost/error.h"

namespace phishcost {

using json = nlohmann::ordered_json;

std::string_view FamilyName(ModelFamily family) {
  switch (family) {
    case ModelFamily::kLogistic:
      return "logistic";
    case ModelFamily::kRandomForest:
      return "random_forest";
    case ModelFamily::kGradientBoosting:
      return "gbdt";
    case ModelFamily::kGradientBoostingVariant:
      return "gbdt_newton";
  }
  return "unknown";
}

std::string_view FamilyLabel(ModelFamily family) {
  switch (family) {
    case ModelFamily::kLogistic:
      return "Logit";
    case ModelFamily::kRandomForest:
      return "RF";
    case ModelFamily::kGradientBoosting:
      return "GBDT";
    case ModelFamily::kGradientBoostingVariant:
      return "XGB";
  }
  return "unknown";
}

std::optional<ModelFamily> ParseFamily(std::string_view text) {
  const std::string s = internal::Lower(internal::Trim(text));
  for (ModelFamily f : kAllFamilies) {
    if (s == FamilyName(f) || s == internal::Lower(FamilyLabel(f))) return f;
  }
  if (s == "logit" || s == "lr" || s == "logreg") return ModelFamily::kLogistic;
  if (s == "rf" || s == "forest") return ModelFamily::kRandomForest;
  if (s == "gb" || s == "gradient_boosting") {
    return ModelFamily::kGradientBoosting;
  }
  if (s == "xgb" || s == "xgboost" || s == "newton") {
    return ModelFamily::kGradientBoostingVariant;
  }
  return std::nullopt;
}

ModelSpec ModelSpec::Default(ModelFamily family, std::uint64_t seed) {
  ModelSpec spec;
  spec.family = family;
  spec.seed = seed;
  return spec;
}

int Tree::Depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> depth(nodes.size(), 0);
  int deepest = 0;
  // Children are always stored after their parent.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, depth[i]);
    if (nodes[i].feature >= 0) {
      depth[nodes[i].left] = depth[i] + 1;
      depth[nodes[i].right] = depth[i] + 1;
    }
  }
  return deepest;
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

TrainedModel TrainedModel::Logistic(std::shared_ptr<const FeatureSchema> schema,
                                    std::vector<double> weights, double bias) {
  if (weights.size() != schema->size()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "logistic weights do not match schema width");
  }
  TrainedModel m;
  m.family_ = ModelFamily::kLogistic;
  m.schema_ = std::move(schema);
  m.weights_ = std::move(weights);
  m.bias_ = bias;
  return m;
}

TrainedModel TrainedModel::Forest(std::shared_ptr<const FeatureSchema> schema,
                                  std::vector<Tree> trees) {
  if (trees.empty()) {
    throw Error(ErrorCode::kConfigError, "forest needs at least one tree");
  }
  TrainedModel m;
  m.family_ = ModelFamily::kRandomForest;
  m.schema_ = std::move(schema);
  m.trees_ = std::move(trees);
  return m;
}

TrainedModel TrainedModel::Boosted(ModelFamily family,
                                   std::shared_ptr<const FeatureSchema> schema,
                                   std::vector<Tree> trees, double base_margin,
                                   double scale) {
  TrainedModel m;
  m.family_ = family;
  m.schema_ = std::move(schema);
  m.trees_ = std::move(trees);
  m.base_margin_ = base_margin;
  m.scale_ = scale;
  return m;
}

double TrainedModel::PredictProba(std::span<const FeatureValue> x) const {
  if (!schema_ || x.size() != schema_->size()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "input width does not match model schema", x.size());
  }
  switch (family_) {
    case ModelFamily::kLogistic: {
      double z = bias_;
      for (std::size_t j = 0; j < x.size(); ++j) z += weights_[j] * ToInt(x[j]);
      return Sigmoid(z);
    }
    case ModelFamily::kRandomForest: {
      double sum = 0.0;
      for (const Tree& t : trees_) sum += t.Eval(x);
      return sum / static_cast<double>(trees_.size());
    }
    case ModelFamily::kGradientBoosting:
    case ModelFamily::kGradientBoostingVariant: {
      double sum = 0.0;
      for (const Tree& t : trees_) sum += t.Eval(x);
      return Sigmoid(base_margin_ + scale_ * sum);
    }
  }
  return 0.0;
}

double TrainedModel::PredictProba(const FeatureVector& x) const {
  if (!schema_ || !(x.schema() == *schema_)) {
    throw Error(ErrorCode::kSchemaMismatch,
                "feature vector bound to a different schema");
  }
  return PredictProba(x.values());
}

namespace {

json TreeToJson(const Tree& tree) {
  json feature = json::array(), threshold = json::array(),
       left = json::array(), right = json::array(), value = json::array();
  for (const Tree::Node& n : tree.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(static_cast<int>(n.threshold));
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  return json{{"feature", feature},
              {"threshold", threshold},
              {"left", left},
              {"right", right},
              {"value", value}};
}

Tree TreeFromJson(const json& j, std::size_t dim) {
  Tree tree;
  const auto& feature = j.at("feature");
  const std::size_t n = feature.size();
  tree.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Tree::Node& node = tree.nodes[i];
    node.feature = j.at("feature").at(i).get<std::int32_t>();
    node.threshold = static_cast<std::int8_t>(j.at("threshold").at(i).get<int>());
    node.left = j.at("left").at(i).get<std::int32_t>();
    node.right = j.at("right").at(i).get<std::int32_t>();
    node.value = j.at("value").at(i).get<double>();
    if (node.feature >= 0) {
      const auto limit = static_cast<std::int32_t>(n);
      if (static_cast<std::size_t>(node.feature) >= dim ||
          node.left <= static_cast<std::int32_t>(i) || node.left >= limit ||
          node.right <= static_cast<std::int32_t>(i) || node.right >= limit) {
        throw Error(ErrorCode::kParseError, "malformed tree node", i);
      }
    }
  }
  if (n == 0) throw Error(ErrorCode::kParseError, "empty tree");
  return tree;
}

}  // namespace

std::string TrainedModel::ToJson() const {
  json out;
  out["format"] = "phishcost.model";
  out["version"] = 1;
  out["family"] = std::string(FamilyName(family_));
  out["schema_hash"] = schema_->Hash();
  out["features"] = schema_->Names();
  if (family_ == ModelFamily::kLogistic) {
    out["weights"] = weights_;
    out["bias"] = bias_;
  } else {
    out["base_margin"] = base_margin_;
    out["scale"] = scale_;
    json trees = json::array();
    for (const Tree& t : trees_) trees.push_back(TreeToJson(t));
    out["trees"] = std::move(trees);
  }
  return out.dump();
}

TrainedModel TrainedModel::FromJson(
    std::string_view text, std::shared_ptr<const FeatureSchema> schema) {
  json in;
  try {
    in = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("model json: ") + e.what());
  }
  try {
    if (in.at("format").get<std::string>() != "phishcost.model") {
      throw Error(ErrorCode::kParseError, "not a model file");
    }
    if (in.at("schema_hash").get<std::string>() != schema->Hash()) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "model was trained on a different feature schema");
    }
    auto family = ParseFamily(in.at("family").get<std::string>());
    if (!family) throw Error(ErrorCode::kParseError, "unknown model family");
    if (*family == ModelFamily::kLogistic) {
      return Logistic(std::move(schema),
                      in.at("weights").get<std::vector<double>>(),
                      in.at("bias").get<double>());
    }
    std::vector<Tree> trees;
    for (const json& t : in.at("trees")) {
      trees.push_back(TreeFromJson(t, schema->size()));
    }
    if (*family == ModelFamily::kRandomForest) {
      return Forest(std::move(schema), std::move(trees));
    }
    return Boosted(*family, std::move(schema), std::move(trees),
                   in.at("base_margin").get<double>(),
                   in.at("scale").get<double>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("model json: ") + e.what());
  }
}

double Auc(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch, "scores and labels differ in size");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney U with midranks for ties.
  double rank_sum = 0.0;
  std::size_t pos = 0, neg = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t k = i;
    while (k < order.size() && scores[order[k]] == scores[order[i]]) ++k;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(k)) / 2.0;
    for (std::size_t t = i; t < k; ++t) {
      if (labels[order[t]] == Label::kLegitimate) {
        rank_sum += midrank;
        ++pos;
      } else {
        ++neg;
      }
    }
    i = k;
  }
  if (pos == 0 || neg == 0) {
    throw Error(ErrorCode::kDegenerateData, "AUC needs both classes");
  }
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1) / 2.0) / (p * static_cast<double>(neg));
}

IIDMetrics EvaluateIid(const Classifier& model, const LabeledDataset& test) {
  const std::size_t phish = test.CountLabel(Label::kPhishing);
  if (phish == 0 || phish == test.size()) {
    throw Error(ErrorCode::kDegenerateData,
                "evaluation data must contain both classes");
  }
  std::vector<double> scores(test.size());
  std::size_t correct = 0, caught = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    scores[i] = model.PredictProba(test.row(i));
    const Label pred =
        scores[i] >= 0.5 ? Label::kLegitimate : Label::kPhishing;
    if (pred == test.label(i)) ++correct;
    if (test.label(i) == Label::kPhishing && pred == Label::kPhishing) ++caught;
  }
  IIDMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  m.auc = Auc(scores, test.labels());
  m.phishing_tpr = static_cast<double>(caught) / static_cast<double>(phish);
  return m;
}

}  // namespace phishcost
