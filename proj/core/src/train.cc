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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "phishcost/error.h"
#include "phishcost/model.h"
#include "phishcost/random.h"

namespace phishcost {
namespace {

using Index = std::uint32_t;

// Binary target used by every trainer: phishing 0, legitimate 1.
std::vector<double> Targets(const LabeledDataset& data) {
  std::vector<double> y(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    y[i] = data.label(i) == Label::kLegitimate ? 1.0 : 0.0;
  }
  return y;
}

void RequireBothClasses(const LabeledDataset& data) {
  std::size_t pos = data.CountLabel(Label::kLegitimate);
  if (data.empty() || pos == 0 || pos == data.size()) {
    throw Error(ErrorCode::kDegenerateData,
                "training data must contain both classes");
  }
}

// ---------------------------------------------------------------------------
// Logistic regression: Newton's method on
//   0.5 * |w|^2 + C * sum_i logloss(y_i, w.x_i + b)
// with an unpenalized intercept and backtracking on the objective.

TrainedModel TrainLogistic(const LogisticParams& params,
                           const LabeledDataset& data) {
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  const Eigen::Index d = static_cast<Eigen::Index>(data.dim());
  Eigen::MatrixXd x(n, d + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = data.row(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = ToInt(row[j]);
    x(i, d) = 1.0;
  }
  std::vector<double> yv = Targets(data);
  Eigen::Map<const Eigen::VectorXd> y(yv.data(), n);
  Eigen::VectorXd penalty = Eigen::VectorXd::Ones(d + 1);
  penalty(d) = 0.0;

  auto objective = [&](const Eigen::VectorXd& beta) {
    Eigen::VectorXd z = x * beta;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      // log(1 + exp(z)) - y z, evaluated stably.
      double zi = z(i);
      double softplus = zi > 0 ? zi + std::log1p(std::exp(-zi))
                               : std::log1p(std::exp(zi));
      loss += softplus - y(i) * zi;
    }
    return 0.5 * beta.cwiseProduct(penalty).squaredNorm() + params.c * loss;
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d + 1);
  double current = objective(beta);
  for (int iter = 0; iter < params.max_iterations; ++iter) {
    Eigen::VectorXd z = x * beta;
    Eigen::VectorXd p(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p(i) = Sigmoid(z(i));
      w(i) = p(i) * (1.0 - p(i));
    }
    Eigen::VectorXd grad =
        beta.cwiseProduct(penalty) + params.c * (x.transpose() * (p - y));
    if (grad.lpNorm<Eigen::Infinity>() < params.tolerance) break;
    Eigen::MatrixXd hess = params.c * (x.transpose() * w.asDiagonal() * x);
    hess.diagonal() += penalty;
    hess.diagonal().array() += 1e-12;
    Eigen::VectorXd step = hess.ldlt().solve(grad);
    double t = 1.0;
    Eigen::VectorXd next = beta - step;
    double value = objective(next);
    while (value > current && t > 1e-10) {
      t *= 0.5;
      next = beta - t * step;
      value = objective(next);
    }
    if (value > current) break;
    beta = next;
    if (current - value <= 1e-15 * std::max(1.0, std::abs(current))) {
      current = value;
      break;
    }
    current = value;
  }
  std::vector<double> weights(beta.data(), beta.data() + d);
  return TrainedModel::Logistic(data.schema_ptr(), std::move(weights), beta(d));
}

// ---------------------------------------------------------------------------
// Tree growing over ternary features. Each node histograms its samples into
// the three value bins per feature; the two candidate thresholds are -1 and
// 0 (x <= threshold goes left).

struct Candidate {
  int feature = -1;
  std::int8_t threshold = 0;
  double gain = 0.0;
};

template <class Policy>
class TreeGrower {
 public:
  using Acc = typename Policy::Acc;

  TreeGrower(const LabeledDataset& data, Policy& policy, int max_depth,
             int min_samples_split, int min_samples_leaf)
      : data_(data),
        policy_(policy),
        max_depth_(max_depth),
        min_samples_split_(min_samples_split),
        min_samples_leaf_(min_samples_leaf) {}

  Tree Grow(std::vector<Index> samples) {
    samples_ = std::move(samples);
    tree_.nodes.clear();
    Build(0, samples_.size(), 0);
    return std::move(tree_);
  }

 private:
  Acc Accumulate(std::size_t begin, std::size_t end) const {
    Acc acc;
    for (std::size_t k = begin; k < end; ++k) policy_.Add(acc, samples_[k]);
    return acc;
  }

  std::int32_t Build(std::size_t begin, std::size_t end, int depth) {
    const std::int32_t id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const Acc parent = Accumulate(begin, end);
    const auto count = static_cast<int>(end - begin);

    Candidate best;
    if (depth < max_depth_ && count >= min_samples_split_ &&
        !policy_.IsPure(parent)) {
      best = FindSplit(begin, end, parent);
    }
    if (best.feature < 0) {
      tree_.nodes[id].value = policy_.LeafValue(parent);
      return id;
    }

    const auto f = static_cast<std::size_t>(best.feature);
    const int t = best.threshold;
    auto mid = std::stable_partition(
        samples_.begin() + static_cast<std::ptrdiff_t>(begin),
        samples_.begin() + static_cast<std::ptrdiff_t>(end),
        [&](Index s) { return ToInt(data_.row(s)[f]) <= t; });
    const auto split = static_cast<std::size_t>(mid - samples_.begin());

    tree_.nodes[id].feature = best.feature;
    tree_.nodes[id].threshold = best.threshold;
    std::int32_t left = Build(begin, split, depth + 1);
    std::int32_t right = Build(split, end, depth + 1);
    tree_.nodes[id].left = left;
    tree_.nodes[id].right = right;
    return id;
  }

  Candidate FindSplit(std::size_t begin, std::size_t end, const Acc& parent) {
    Candidate best;
    const std::vector<std::size_t>& order = policy_.FeatureOrder();
    const int budget = policy_.MaxFeatures();
    int visited = 0;
    for (std::size_t f : order) {
      if (budget > 0 && visited >= budget) break;
      Acc bins[3];
      int counts[3] = {0, 0, 0};
      for (std::size_t k = begin; k < end; ++k) {
        const Index s = samples_[k];
        const int b = ToInt(data_.row(s)[f]) + 1;
        policy_.Add(bins[b], s);
        ++counts[b];
      }
      const int nonempty = (counts[0] > 0) + (counts[1] > 0) + (counts[2] > 0);
      if (nonempty < 2) continue;  // constant in this node; not counted
      ++visited;
      for (int t = -1; t <= 0; ++t) {
        Acc left, right;
        int n_left = 0, n_right = 0;
        for (int b = 0; b < 3; ++b) {
          if (b - 1 <= t) {
            Policy::Merge(left, bins[b]);
            n_left += counts[b];
          } else {
            Policy::Merge(right, bins[b]);
            n_right += counts[b];
          }
        }
        if (n_left < min_samples_leaf_ || n_right < min_samples_leaf_) continue;
        if (!policy_.Admissible(left, right)) continue;
        const double gain = policy_.Gain(left, right, parent);
        if (!policy_.Acceptable(gain)) continue;
        if (best.feature < 0 || gain > best.gain) {
          best = {static_cast<int>(f), static_cast<std::int8_t>(t), gain};
        }
      }
    }
    return best;
  }

  const LabeledDataset& data_;
  Policy& policy_;
  int max_depth_;
  int min_samples_split_;
  int min_samples_leaf_;
  std::vector<Index> samples_;
  Tree tree_;
};

// Weighted Gini for bootstrap-sampled classification trees.
class GiniPolicy {
 public:
  struct Acc {
    double w = 0.0;
    double w1 = 0.0;
  };

  GiniPolicy(const std::vector<double>& y, const std::vector<double>& weight,
             std::size_t dim, int max_features, Rng& rng)
      : y_(y), weight_(weight), max_features_(max_features), rng_(rng) {
    order_.resize(dim);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
  }

  void Add(Acc& acc, Index s) const {
    acc.w += weight_[s];
    acc.w1 += weight_[s] * y_[s];
  }
  static void Merge(Acc& into, const Acc& from) {
    into.w += from.w;
    into.w1 += from.w1;
  }
  static double Gini(const Acc& a) {
    if (a.w <= 0) return 0.0;
    double p = a.w1 / a.w;
    return 2.0 * p * (1.0 - p);
  }
  bool IsPure(const Acc& a) const { return a.w1 <= 0.0 || a.w1 >= a.w; }
  bool Admissible(const Acc&, const Acc&) const { return true; }
  bool Acceptable(double) const { return true; }
  double Gain(const Acc& l, const Acc& r, const Acc& p) const {
    return p.w * Gini(p) - l.w * Gini(l) - r.w * Gini(r);
  }
  double LeafValue(const Acc& a) const { return a.w > 0 ? a.w1 / a.w : 0.5; }

  // A fresh random feature order per node.
  const std::vector<std::size_t>& FeatureOrder() {
    rng_.Shuffle(std::span<std::size_t>(order_));
    return order_;
  }
  int MaxFeatures() const { return max_features_; }

 private:
  const std::vector<double>& y_;
  const std::vector<double>& weight_;
  int max_features_;
  Rng& rng_;
  std::vector<std::size_t> order_;
};

// Least squares on the log-loss pseudo-residuals; leaves take one Newton
// step sum(r) / sum(p (1 - p)).
class ResidualPolicy {
 public:
  struct Acc {
    double n = 0.0;
    double sum = 0.0;
    double sum_sq = 0.0;
    double hess = 0.0;
  };

  ResidualPolicy(const std::vector<double>& residual,
                 const std::vector<double>& hessian, std::size_t dim)
      : residual_(residual), hessian_(hessian) {
    order_.resize(dim);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
  }

  void Add(Acc& acc, Index s) const {
    const double r = residual_[s];
    acc.n += 1.0;
    acc.sum += r;
    acc.sum_sq += r * r;
    acc.hess += hessian_[s];
  }
  static void Merge(Acc& into, const Acc& from) {
    into.n += from.n;
    into.sum += from.sum;
    into.sum_sq += from.sum_sq;
    into.hess += from.hess;
  }
  bool IsPure(const Acc& a) const {
    const double mean = a.sum / a.n;
    return a.sum_sq / a.n - mean * mean <= 1e-15;
  }
  bool Admissible(const Acc&, const Acc&) const { return true; }
  bool Acceptable(double) const { return true; }
  // Reduction in squared error: n_l n_r / n * (mean_l - mean_r)^2.
  double Gain(const Acc& l, const Acc& r, const Acc&) const {
    const double diff = l.sum / l.n - r.sum / r.n;
    return l.n * r.n / (l.n + r.n) * diff * diff;
  }
  double LeafValue(const Acc& a) const {
    return std::abs(a.hess) < 1e-150 ? 0.0 : a.sum / a.hess;
  }
  const std::vector<std::size_t>& FeatureOrder() const { return order_; }
  int MaxFeatures() const { return 0; }

 private:
  const std::vector<double>& residual_;
  const std::vector<double>& hessian_;
  std::vector<std::size_t> order_;
};

// Second-order gain with L2-regularized leaf weights -G / (H + lambda).
class NewtonPolicy {
 public:
  struct Acc {
    double g = 0.0;
    double h = 0.0;
  };

  NewtonPolicy(const std::vector<double>& grad, const std::vector<double>& hess,
               std::size_t dim, double l2, double min_child_weight)
      : grad_(grad), hess_(hess), l2_(l2), min_child_weight_(min_child_weight) {
    order_.resize(dim);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
  }

  void Add(Acc& acc, Index s) const {
    acc.g += grad_[s];
    acc.h += hess_[s];
  }
  static void Merge(Acc& into, const Acc& from) {
    into.g += from.g;
    into.h += from.h;
  }
  bool IsPure(const Acc& a) const { return a.h < 2.0 * min_child_weight_; }
  bool Admissible(const Acc& l, const Acc& r) const {
    return l.h >= min_child_weight_ && r.h >= min_child_weight_;
  }
  bool Acceptable(double gain) const { return gain > 1e-6; }
  double Score(const Acc& a) const { return a.g * a.g / (a.h + l2_); }
  double Gain(const Acc& l, const Acc& r, const Acc& p) const {
    return 0.5 * (Score(l) + Score(r) - Score(p));
  }
  double LeafValue(const Acc& a) const { return -a.g / (a.h + l2_); }
  const std::vector<std::size_t>& FeatureOrder() const { return order_; }
  int MaxFeatures() const { return 0; }

 private:
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  double l2_;
  double min_child_weight_;
  std::vector<std::size_t> order_;
};

TrainedModel TrainForest(const ModelSpec& spec, const LabeledDataset& data) {
  const ForestParams& p = spec.forest;
  const std::size_t n = data.size();
  const std::vector<double> y = Targets(data);
  const int max_features =
      p.max_features > 0
          ? p.max_features
          : std::max(1, static_cast<int>(std::floor(
                            std::sqrt(static_cast<double>(data.dim())))));
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(p.trees));
  for (int t = 0; t < p.trees; ++t) {
    Rng rng(DeriveSeed(spec.seed, static_cast<std::uint64_t>(t)));
    std::vector<double> weight(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) weight[rng.Below(n)] += 1.0;
    std::vector<Index> samples;
    for (std::size_t i = 0; i < n; ++i) {
      if (weight[i] > 0) samples.push_back(static_cast<Index>(i));
    }
    GiniPolicy policy(y, weight, data.dim(), max_features, rng);
    TreeGrower<GiniPolicy> grower(data, policy, p.max_depth,
                                  p.min_samples_split, p.min_samples_leaf);
    trees.push_back(grower.Grow(std::move(samples)));
  }
  return TrainedModel::Forest(data.schema_ptr(), std::move(trees));
}

TrainedModel TrainBoosting(const ModelSpec& spec, const LabeledDataset& data) {
  const BoostingParams& p = spec.boosting;
  const std::size_t n = data.size();
  const std::vector<double> y = Targets(data);
  const bool newton = spec.family == ModelFamily::kGradientBoostingVariant;

  double base = 0.0;
  if (!newton) {
    const double prior =
        std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    base = std::log(prior / (1.0 - prior));
  }
  std::vector<double> margin(n, base);
  std::vector<double> first(n), second(n);
  std::vector<Index> all(n);
  std::iota(all.begin(), all.end(), Index{0});

  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(p.estimators));
  for (int m = 0; m < p.estimators; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      const double prob = Sigmoid(margin[i]);
      // Residual policy wants y - p; Newton policy wants the gradient p - y.
      first[i] = newton ? prob - y[i] : y[i] - prob;
      second[i] = prob * (1.0 - prob);
    }
    Tree tree;
    if (newton) {
      NewtonPolicy policy(first, second, data.dim(), p.l2, p.min_child_weight);
      TreeGrower<NewtonPolicy> grower(data, policy, p.max_depth,
                                      p.min_samples_split, p.min_samples_leaf);
      tree = grower.Grow(all);
    } else {
      ResidualPolicy policy(first, second, data.dim());
      TreeGrower<ResidualPolicy> grower(data, policy, p.max_depth,
                                        p.min_samples_split,
                                        p.min_samples_leaf);
      tree = grower.Grow(all);
    }
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] += p.learning_rate * tree.Eval(data.row(i));
    }
    trees.push_back(std::move(tree));
  }
  return TrainedModel::Boosted(spec.family, data.schema_ptr(), std::move(trees),
                               base, p.learning_rate);
}

}  // namespace

TrainedModel Train(const ModelSpec& spec, const LabeledDataset& train) {
  RequireBothClasses(train);
  switch (spec.family) {
    case ModelFamily::kLogistic:
      if (spec.logistic.c <= 0) {
        throw Error(ErrorCode::kConfigError, "logistic C must be positive");
      }
      return TrainLogistic(spec.logistic, train);
    case ModelFamily::kRandomForest:
      if (spec.forest.trees < 1 || spec.forest.max_depth < 1) {
        throw Error(ErrorCode::kConfigError,
                    "forest needs >= 1 tree and depth >= 1");
      }
      return TrainForest(spec, train);
    case ModelFamily::kGradientBoosting:
    case ModelFamily::kGradientBoostingVariant:
      if (spec.boosting.estimators < 1 || spec.boosting.max_depth < 1 ||
          spec.boosting.learning_rate <= 0) {
        throw Error(ErrorCode::kConfigError,
                    "boosting needs >= 1 estimator, depth >= 1, rate > 0");
      }
      return TrainBoosting(spec, train);
  }
  throw Error(ErrorCode::kConfigError, "unknown model family");
}

}  // namespace phishcost
