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

#include "phishcost/feature_selection.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "phishcost/error.h"

namespace phishcost {
namespace {

double Entropy(double a, double b) {
  const double n = a + b;
  double h = 0.0;
  for (double c : {a, b}) {
    if (c > 0) h -= c / n * std::log(c / n);
  }
  return h;
}

std::vector<std::size_t> TopOf(const std::vector<std::size_t>& ranking,
                               const FeatureSchema& schema,
                               bool (*keep)(FeatureGroup), std::size_t k,
                               std::string_view set_name) {
  std::vector<std::size_t> out;
  for (std::size_t j : ranking) {
    if (out.size() == k) break;
    if (keep(schema.feature(j).group)) out.push_back(j);
  }
  if (out.size() < k) {
    throw Error(ErrorCode::kConfigError,
                std::string(set_name) + ": schema has too few features in " +
                    "the required groups");
  }
  return out;
}

bool AnyGroup(FeatureGroup) { return true; }
bool SurfaceGroup(FeatureGroup g) { return g == FeatureGroup::kSurface; }
bool DeepGroup(FeatureGroup g) { return g != FeatureGroup::kSurface; }

}  // namespace

std::vector<double> InformationGain(const LabeledDataset& data) {
  std::vector<double> gain(data.dim(), 0.0);
  if (data.empty()) return gain;
  const double n = static_cast<double>(data.size());
  const double pos = static_cast<double>(data.CountLabel(Label::kLegitimate));
  const double prior = Entropy(pos, n - pos);
  for (std::size_t j = 0; j < data.dim(); ++j) {
    std::array<std::array<double, 2>, 3> counts{};
    for (std::size_t i = 0; i < data.size(); ++i) {
      const int v = ToInt(data.row(i)[j]) + 1;
      counts[v][data.label(i) == Label::kLegitimate ? 1 : 0] += 1.0;
    }
    double conditional = 0.0;
    for (const auto& c : counts) {
      const double m = c[0] + c[1];
      if (m > 0) conditional += m / n * Entropy(c[0], c[1]);
    }
    gain[j] = prior - conditional;
  }
  return gain;
}

std::vector<std::size_t> RankByInformationGain(const LabeledDataset& data) {
  const std::vector<double> gain = InformationGain(data);
  std::vector<std::size_t> order(gain.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return gain[a] > gain[b]; });
  return order;
}

FeatureSetConfig DeriveFeatureSet(std::string_view name,
                                  const LabeledDataset& train) {
  const FeatureSchema& schema = train.schema();
  std::vector<std::size_t> picked;
  if (name == "Full") {
    picked.resize(schema.size());
    std::iota(picked.begin(), picked.end(), std::size_t{0});
  } else {
    const std::vector<std::size_t> ranking = RankByInformationGain(train);
    if (name == "AAS-12a") {
      picked = TopOf(ranking, schema, AnyGroup, 12, name);
    } else if (name == "AAS-11b") {
      picked = TopOf(ranking, schema, AnyGroup, 11, name);
    } else if (name == "VA-8a") {
      picked = TopOf(ranking, schema, SurfaceGroup, 8, name);
    } else if (name == "VA-7b") {
      picked = TopOf(ranking, schema, SurfaceGroup, 7, name);
    } else if (name == "RA-8") {
      const auto ssl = schema.IndexOf("SSLfinal_State");
      std::vector<std::size_t> rest;
      for (std::size_t j : ranking) {
        if (!ssl || j != *ssl) rest.push_back(j);
      }
      picked = TopOf(rest, schema, DeepGroup, ssl ? 7 : 8, name);
      if (ssl) picked.push_back(*ssl);
    } else {
      throw Error(ErrorCode::kConfigError,
                  "not a built-in feature set: " + std::string(name));
    }
  }
  std::sort(picked.begin(), picked.end());
  FeatureSetConfig cfg;
  cfg.name = std::string(name);
  for (std::size_t j : picked) cfg.members.push_back(schema.feature(j).name);
  return cfg;
}

std::vector<FeatureSetConfig> DeriveBuiltinFeatureSets(
    const LabeledDataset& train) {
  std::vector<FeatureSetConfig> out;
  for (const std::string& name : BuiltinFeatureSetNames()) {
    out.push_back(DeriveFeatureSet(name, train));
  }
  return out;
}

}  // namespace phishcost
