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

#ifndef PHISHCOST_EXPERIMENT_H_
#define PHISHCOST_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phishcost/cost.h"
#include "phishcost/cost_model.h"
#include "phishcost/dataset.h"
#include "phishcost/error.h"
#include "phishcost/evasion.h"
#include "phishcost/feature_schema.h"
#include "phishcost/metrics.h"
#include "phishcost/model.h"

namespace phishcost {

inline constexpr std::string_view kVersion = "0.1.0";

struct SeedConfig {
  std::uint64_t split = 1337;
  std::uint64_t model = 0;
  std::uint64_t sample = 2024;
  std::uint64_t bootstrap = 7;
  std::uint64_t tiebreak = 11;
  std::uint64_t noise = 13;
};

struct SensitivityConfig {
  std::vector<std::string> feature_sets = {"Full", "RA-8"};
  std::string schedule = "base";
  std::vector<Rational> surface_scales = {1, 2, 3, 4};
  std::vector<Rational> semi_domain_scales = {Rational(1, 2), 1, 2};
  std::vector<Rational> infrastructure_scales = {Rational(1, 2), 1, 2};
  std::string reclassify_feature = "SSLfinal_State";
  std::vector<FeatureGroup> reclassify_groups = {FeatureGroup::kSemiDomain,
                                                 FeatureGroup::kInfrastructure};
  int noise_draws = 50;
};

struct StratifyConfig {
  std::string feature_set = "RA-8";
  std::string schedule = "strict";
  std::string feature = "SSLfinal_State";
};

// A cell selector "<feature set>/<schedule>".
struct CellSelector {
  std::string feature_set;
  std::string schedule;
  std::string Key() const { return feature_set + "/" + schedule; }
  static CellSelector Parse(std::string_view text);
};

struct ExperimentConfig {
  std::string dataset;
  std::string label_column = "Result";
  bool strict_parsing = true;
  // Optional feature-set/group-map file; built-in sets it does not list are
  // derived from the training split.
  std::string feature_config;
  SplitSpec split;
  std::vector<std::string> feature_sets = {"Full",  "AAS-12a", "AAS-11b",
                                           "RA-8",  "VA-8a",   "VA-7b"};
  // Built-in names or schedule file paths.
  std::vector<std::string> schedules = {"base", "strict"};
  std::vector<ModelFamily> models = {
      ModelFamily::kLogistic, ModelFamily::kRandomForest,
      ModelFamily::kGradientBoosting, ModelFamily::kGradientBoostingVariant};
  std::size_t n_eval = 300;
  std::int64_t b_max = 18;
  SeedConfig seeds;
  int bootstrap_resamples = 200;
  int tiebreak_orders = 10;
  std::vector<CellSelector> tiebreak_cells = {{"Full", "base"}};
  // Cells that are also evaluated on each model's whole conditioning set.
  std::vector<CellSelector> full_p0_cells = {{"Full", "base"}};
  std::vector<std::int64_t> query_budgets = {50, 100, 500};
  std::vector<CellSelector> query_cells = {{"Full", "base"},
                                           {"RA-8", "strict"}};
  SensitivityConfig sensitivity;
  StratifyConfig stratify;
};

// Accepts a config object or a run manifest holding one under "config".
// Unknown keys are rejected. Throws kConfigError.
ExperimentConfig ParseExperimentConfig(std::string_view json_text);
ExperimentConfig LoadExperimentConfig(const std::string& path);
std::string ExperimentConfigJson(const ExperimentConfig& config);
// Digest of the canonical config JSON.
std::string ConfigHash(const ExperimentConfig& config);

// Models, conditioning sets and the evaluation sample of one feature set.
struct FeatureSetRun {
  FeatureSetConfig set;
  std::shared_ptr<const FeatureSchema> schema;
  LabeledDataset train;
  LabeledDataset test;
  std::vector<ModelFamily> families;
  std::vector<TrainedModel> models;
  std::vector<IIDMetrics> iid;
  std::vector<ConditioningSet> p0;
  std::size_t intersection_size = 0;
  // Evaluation sample (row ids ascending) and its feature rows.
  std::vector<std::size_t> sample_ids;
  std::vector<std::vector<FeatureValue>> sample;
  // Set when the sample could not be drawn; models remain usable.
  std::optional<std::string> error;

  std::size_t ModelIndex(ModelFamily family) const;
  std::vector<std::vector<FeatureValue>> Rows(
      std::span<const std::size_t> ids) const;
};

struct CellMetrics {
  std::size_t n = 0;
  std::size_t infinite = 0;
  Rational noev;
  Rational fri;
  Rational fri_by_instance;
  std::optional<Quartiles> quartiles;
  Cost c_min;
  Rational alpha_hat;
  bool cost_floor_bound_holds = true;
  std::optional<ConcentrationStats> concentration;
  std::vector<SurvivalPoint> survival;
  std::vector<BootstrapCi> cis;
};

// Metrics of one batch. CIs are skipped when resamples is 0.
CellMetrics ComputeCellMetrics(std::span<const EvasionResult> results,
                               std::size_t dim, const Cost& c_min,
                               std::int64_t b_max, int resamples,
                               std::uint64_t seed);

struct CellReport {
  std::string feature_set;
  std::string schedule;
  ModelFamily model = ModelFamily::kLogistic;
  std::optional<std::string> error;
  IIDMetrics iid;
  std::size_t p0_size = 0;
  std::size_t intersection_size = 0;
  std::vector<std::string> features;
  std::shared_ptr<const FeatureSchema> schema;
  std::vector<std::size_t> instance_ids;
  std::vector<EvasionResult> results;
  CellMetrics metrics;
  std::optional<CellMetrics> full_p0;
  std::optional<TiebreakStability> tiebreak;

  std::string Key() const;
};

struct FeatureSetSummary {
  std::string name;
  std::vector<std::string> members;
  std::size_t intersection_size = 0;
  std::vector<std::size_t> sample_ids;
  std::optional<std::string> error;
};

struct GridReport {
  std::vector<FeatureSetSummary> feature_sets;
  std::vector<CellReport> cells;
  bool partial() const;
};

struct PerturbationRow {
  std::string feature_set;
  ModelFamily model = ModelFamily::kLogistic;
  std::string kind;  // "surface_scale", "semi_domain_scale", ...
  std::string perturbation;
  std::optional<Rational> median;
  Rational rci3;
  std::vector<std::string> top3;
  Rational noev;
};

struct NoiseSummary {
  std::string feature_set;
  ModelFamily model = ModelFamily::kLogistic;
  int draws = 0;
  double rci3_mean = 0.0;
  double rci3_std = 0.0;
  double median_mean = 0.0;
  double median_std = 0.0;
  // Share of draws whose top-3 feature set equals the unperturbed one.
  double top3_agreement = 0.0;
};

struct SensitivityReport {
  std::vector<PerturbationRow> rows;
  std::vector<NoiseSummary> noise;
  std::vector<std::string> annotations;
};

struct QueryBudgetRow {
  std::string feature_set;
  std::string schedule;
  ModelFamily model = ModelFamily::kLogistic;
  std::string attacker;  // "greedy-Q50", ..., "exact"
  std::optional<std::int64_t> query_budget;
  Rational s2;
  Rational s4;
  std::vector<SurvivalPoint> survival;
  // Instance-wise greedy mec >= exact mec.
  bool dominates_exact = true;
};

struct QueryBudgetReport {
  std::vector<QueryBudgetRow> rows;
  std::vector<std::string> annotations;
};

struct Stratum {
  std::string model;  // family name or "pooled"
  int initial_value = 0;
  std::size_t n = 0;
  std::vector<SurvivalPoint> survival;
  std::optional<Rational> median;
};

struct StratifiedReport {
  std::string feature_set;
  std::string schedule;
  std::string feature;
  std::vector<Stratum> strata;
  std::vector<std::string> annotations;
};

// One experiment: the loaded dataset, its split, resolved feature sets and
// lazily trained per-feature-set models. All randomness derives from the
// config seeds, so results do not depend on `workers`.
class Experiment {
 public:
  // Throws data errors (kIoError, kParseError, kLabelDomainError,
  // kDegenerateData) and kConfigError.
  explicit Experiment(ExperimentConfig config, unsigned workers = 1);
  // Uses an already loaded dataset; config.dataset is only recorded.
  Experiment(ExperimentConfig config, LabeledDataset dataset,
             unsigned workers = 1);

  const ExperimentConfig& config() const { return config_; }
  const LabeledDataset& dataset() const { return dataset_; }
  const std::string& dataset_hash() const { return dataset_hash_; }
  const DataSplit& split() const { return split_; }
  std::size_t dropped_rows() const { return dropped_rows_; }
  unsigned workers() const { return workers_; }

  // Members of a feature set: from the feature config if listed there,
  // derived from the training split for built-ins, kConfigError otherwise.
  FeatureSetConfig ResolveFeatureSet(const std::string& name) const;
  // Trains (once) and returns the run for a feature set.
  const FeatureSetRun& FeatureSet(const std::string& name);
  const CostSchedule& Schedule(const std::string& name);

  GridReport RunMainGrid();
  SensitivityReport RunSensitivity();
  QueryBudgetReport RunQueryBudget();
  StratifiedReport RunStratified();

  // Exact results for (feature set, schedule, model) on the shared sample.
  const std::vector<EvasionResult>& ExactResults(const std::string& feature_set,
                                                 const std::string& schedule,
                                                 ModelFamily model);

 private:
  void Prepare(LabeledDataset dataset);

  ExperimentConfig config_;
  unsigned workers_;
  FeatureConfig feature_config_;
  LabeledDataset dataset_;
  std::string dataset_hash_;
  std::size_t dropped_rows_ = 0;
  DataSplit split_;
  std::map<std::string, std::unique_ptr<FeatureSetRun>> runs_;
  std::map<std::string, CostSchedule> schedules_;
  std::map<std::string, std::vector<EvasionResult>> exact_cache_;
};

struct RunArtifacts {
  const GridReport* grid = nullptr;
  const SensitivityReport* sensitivity = nullptr;
  const QueryBudgetReport* query_budget = nullptr;
  const StratifiedReport* stratified = nullptr;
};

// Deterministic metric documents (no timestamps).
std::string GridJson(const Experiment& experiment, const GridReport& grid);
std::string SensitivityJson(const SensitivityReport& report);
std::string QueryBudgetJson(const QueryBudgetReport& report);
std::string StratifiedJson(const StratifiedReport& report);
std::string SurvivalCsv(std::span<const SurvivalPoint> curve);

// Writes grid.json, survival_<cell>.csv, traces_<cell>.jsonl, split.json,
// the other present reports and manifest.json (the only file carrying
// timestamps). Returns the written file names. Throws kIoError.
std::vector<std::string> EmitReport(const Experiment& experiment,
                                    const RunArtifacts& artifacts,
                                    const std::string& out_dir,
                                    const std::string& started_at);

// UTC time as ISO 8601.
std::string NowUtc();

}  // namespace phishcost

#endif  // PHISHCOST_EXPERIMENT_H_
