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


#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "phishcost/cost_model.h"
#include "phishcost/dataset.h"
#include "phishcost/evasion.h"
#include "phishcost/metrics.h"
#include "phishcost/model.h"
#include "phishcost/random.h"

namespace phishcost {
namespace {

constexpr std::size_t kDim = 30;

// Labels follow a sparse linear rule over ternary features plus noise, which
// gives trained models the few-dominant-features shape of real detectors.
LabeledDataset MakeData(std::size_t rows, std::uint64_t seed) {
  std::vector<FeatureSpec> specs;
  for (std::size_t j = 0; j < kDim; ++j) {
    specs.push_back({"f" + std::to_string(j), kAllGroups[j % 3],
                     ValueSet::Ternary()});
  }
  auto schema = std::make_shared<const FeatureSchema>(std::move(specs));
  Rng rng(seed);
  std::vector<FeatureValue> values;
  std::vector<Label> labels;
  for (std::size_t i = 0; i < rows; ++i) {
    double score = 0;
    for (std::size_t j = 0; j < kDim; ++j) {
      const int v = static_cast<int>(rng.Between(-1, 1));
      values.push_back(ToFeatureValue(v));
      score += v * (j < 3 ? 2.0 : 0.2);
    }
    score += rng.Unit() - 0.5;
    labels.push_back(score > 0 ? Label::kLegitimate : Label::kPhishing);
  }
  return LabeledDataset(schema, std::move(values), std::move(labels));
}

const LabeledDataset& Data() {
  static const LabeledDataset data = MakeData(3000, 1);
  return data;
}

const TrainedModel& Model(ModelFamily family) {
  static std::vector<std::unique_ptr<TrainedModel>> cache(4);
  auto& slot = cache[static_cast<int>(family)];
  if (!slot) {
    slot = std::make_unique<TrainedModel>(
        Train(ModelSpec::Default(family, 0), Data()));
  }
  return *slot;
}

std::vector<std::vector<FeatureValue>> Rejected(const Classifier& model,
                                                std::size_t n) {
  std::vector<std::vector<FeatureValue>> out;
  const LabeledDataset& data = Data();
  for (std::size_t i = 0; i < data.size() && out.size() < n; ++i) {
    if (data.label(i) == Label::kPhishing &&
        model.Predict(data.row(i)) == Label::kPhishing) {
      out.emplace_back(data.row(i).begin(), data.row(i).end());
    }
  }
  return out;
}

void BM_Predict(benchmark::State& state) {
  const auto family = static_cast<ModelFamily>(state.range(0));
  const TrainedModel& model = Model(family);
  const LabeledDataset& data = Data();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.PredictProba(data.row(i)));
    i = (i + 1) % data.size();
  }
  state.SetLabel(std::string(FamilyName(family)));
}
BENCHMARK(BM_Predict)->DenseRange(0, 3);

void BM_MecExact(benchmark::State& state) {
  const auto family = static_cast<ModelFamily>(state.range(0));
  const TrainedModel& model = Model(family);
  const auto xs = Rejected(model, 64);
  const CostSchedule schedule =
      state.range(1) == 0 ? CostSchedule::Base() : CostSchedule::Strict();
  std::size_t i = 0;
  std::uint64_t expanded = 0;
  for (auto _ : state) {
    EvasionResult r =
        MecExact(model, schedule, Data().schema(), xs[i], Cost(18));
    expanded += r.expanded_nodes;
    benchmark::DoNotOptimize(r);
    i = (i + 1) % xs.size();
  }
  state.counters["nodes"] = benchmark::Counter(
      static_cast<double>(expanded), benchmark::Counter::kAvgIterations);
  state.SetLabel(std::string(FamilyName(family)) + "/" + schedule.name());
}
BENCHMARK(BM_MecExact)
    ->ArgsProduct({{0, 1, 2, 3}, {0, 1}})
    ->Unit(benchmark::kMicrosecond);

void BM_MecGreedy(benchmark::State& state) {
  const TrainedModel& model = Model(ModelFamily::kGradientBoosting);
  const auto xs = Rejected(model, 64);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(MecGreedy(model, CostSchedule::Base(),
                                       Data().schema(), xs[i], Cost(18),
                                       state.range(0)));
    i = (i + 1) % xs.size();
  }
}
BENCHMARK(BM_MecGreedy)->Arg(50)->Arg(100)->Arg(500)->Unit(
    benchmark::kMicrosecond);

void BM_Train(benchmark::State& state) {
  const auto family = static_cast<ModelFamily>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Train(ModelSpec::Default(family, 0), Data()));
  }
  state.SetLabel(std::string(FamilyName(family)));
}
BENCHMARK(BM_Train)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_Bootstrap(benchmark::State& state) {
  const TrainedModel& model = Model(ModelFamily::kLogistic);
  const auto xs = Rejected(model, 300);
  const auto results = BatchEvaluate(model, CostSchedule::Base(),
                                     Data().schema(), xs,
                                     AttackerConfig::Exact());
  for (auto _ : state) {
    benchmark::DoNotOptimize(Bootstrap(
        results, kDim, StatisticSpec{Statistic::kRci, 3}, 200, 7));
  }
}
BENCHMARK(BM_Bootstrap)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace phishcost

BENCHMARK_MAIN();
