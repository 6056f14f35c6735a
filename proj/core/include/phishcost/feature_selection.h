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

#ifndef PHISHCOST_FEATURE_SELECTION_H_
#define PHISHCOST_FEATURE_SELECTION_H_

#include <cstddef>
#include <string_view>
#include <vector>

#include "phishcost/dataset.h"
#include "phishcost/feature_schema.h"

namespace phishcost {

// Mutual information (nats) between each feature and the label.
std::vector<double> InformationGain(const LabeledDataset& data);

// Feature indices by descending information gain, ascending index on ties.
std::vector<std::size_t> RankByInformationGain(const LabeledDataset& data);

// Derives a built-in feature set from a ranking on the training split:
//   Full     every feature
//   AAS-12a  top 12 overall;  AAS-11b top 11 overall
//   VA-8a    top 8 surface;   VA-7b   top 7 surface
//   RA-8     SSLfinal_State plus the top 7 semi-domain/infrastructure
//            features (top 8 when the schema lacks SSLfinal_State)
// Members are listed in schema column order. Throws kConfigError for a
// name that is not built in or when a group has too few features.
FeatureSetConfig DeriveFeatureSet(std::string_view name,
                                  const LabeledDataset& train);

// All six built-ins, in BuiltinFeatureSetNames() order.
std::vector<FeatureSetConfig> DeriveBuiltinFeatureSets(
    const LabeledDataset& train);

}  // namespace phishcost

#endif  // PHISHCOST_FEATURE_SELECTION_H_
