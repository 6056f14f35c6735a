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

#include <algorithm>
#include <filesystem>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "internal.h"
#include "phishcost/feature_selection.h"
#include "phishcost/random.h"

namespace phishcost {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void Bad(const std::string& message) {
  throw Error(ErrorCode::kConfigError, "config: " + message);
}

// Typed access to a JSON object that rejects keys it was never asked for.
class Reader {
 public:
  Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) Bad(where_ + " must be an object");
  }
  ~Reader() = default;

  template <typename T>
  void Get(const char* key, T& out) {
    used_.insert(key);
    if (!obj_.contains(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      Bad(where_ + "." + key + " has the wrong type");
    }
  }

  const json* Child(const char* key) {
    used_.insert(key);
    return obj_.contains(key) ? &obj_.at(key) : nullptr;
  }

  void Finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!used_.count(key)) Bad("unknown key " + where_ + "." + key);
    }
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> used_;
};

Rational RationalFromJson(const json& v, const std::string& where) {
  try {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_string()) return Rational::Parse(v.get<std::string>());
    if (v.is_number_float()) return Rational::Parse(v.dump());
  } catch (const Error&) {
  }
  Bad(where + " is not a rational number");
}

json RationalToJson(const Rational& r) {
  if (r.is_integer()) return r.num();
  return r.ToString();
}

std::vector<Rational> RationalList(const json* v, const std::string& where,
                                   std::vector<Rational> fallback) {
  if (v == nullptr) return fallback;
  if (!v->is_array()) Bad(where + " must be an array");
  std::vector<Rational> out;
  for (const json& e : *v) out.push_back(RationalFromJson(e, where));
  return out;
}

std::vector<CellSelector> Selectors(const std::vector<std::string>& texts) {
  std::vector<CellSelector> out;
  for (const std::string& t : texts) out.push_back(CellSelector::Parse(t));
  return out;
}

std::vector<std::string> SelectorTexts(const std::vector<CellSelector>& cells) {
  std::vector<std::string> out;
  for (const CellSelector& c : cells) out.push_back(c.Key());
  return out;
}

bool Selected(const std::vector<CellSelector>& cells, const std::string& fs,
              const std::string& schedule) {
  return std::any_of(cells.begin(), cells.end(), [&](const CellSelector& c) {
    return c.feature_set == fs && c.schedule == schedule;
  });
}

std::string Describe(const Error& e) {
  return std::string(ErrorCodeName(e.code())) + ": " + e.what();
}

}  // namespace

CellSelector CellSelector::Parse(std::string_view text) {
  const auto slash = text.rfind('/');
  if (slash == std::string_view::npos || slash == 0 ||
      slash + 1 == text.size()) {
    Bad("cell selector '" + std::string(text) +
        "' must look like <feature set>/<schedule>");
  }
  return {std::string(text.substr(0, slash)), std::string(text.substr(slash + 1))};
}

ExperimentConfig ParseExperimentConfig(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    Bad(std::string("invalid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("format") &&
      doc["format"] == "phishcost.manifest") {
    if (!doc.contains("config")) Bad("manifest lacks a config block");
    doc = json(doc["config"]);
  }
  ExperimentConfig cfg;
  Reader r(doc, "config");
  r.Get("dataset", cfg.dataset);
  r.Get("label_column", cfg.label_column);
  r.Get("strict_parsing", cfg.strict_parsing);
  r.Get("feature_config", cfg.feature_config);
  if (const json* split = r.Child("split")) {
    Reader s(*split, "split");
    if (const json* f = s.Child("test_fraction")) {
      cfg.split.test_fraction = RationalFromJson(*f, "split.test_fraction");
    }
    s.Get("stratified", cfg.split.stratified);
    s.Finish();
  }
  r.Get("feature_sets", cfg.feature_sets);
  r.Get("schedules", cfg.schedules);
  if (const json* models = r.Child("models")) {
    if (!models->is_array()) Bad("models must be an array");
    cfg.models.clear();
    for (const json& m : *models) {
      if (!m.is_string()) Bad("models entries must be strings");
      auto family = ParseFamily(m.get<std::string>());
      if (!family) Bad("unknown model '" + m.get<std::string>() + "'");
      cfg.models.push_back(*family);
    }
  }
  r.Get("n_eval", cfg.n_eval);
  r.Get("b_max", cfg.b_max);
  if (const json* seeds = r.Child("seeds")) {
    Reader s(*seeds, "seeds");
    s.Get("split", cfg.seeds.split);
    s.Get("model", cfg.seeds.model);
    s.Get("sample", cfg.seeds.sample);
    s.Get("bootstrap", cfg.seeds.bootstrap);
    s.Get("tiebreak", cfg.seeds.tiebreak);
    s.Get("noise", cfg.seeds.noise);
    s.Finish();
  }
  r.Get("bootstrap_resamples", cfg.bootstrap_resamples);
  r.Get("tiebreak_orders", cfg.tiebreak_orders);
  std::vector<std::string> texts;
  texts = SelectorTexts(cfg.tiebreak_cells);
  r.Get("tiebreak_cells", texts);
  cfg.tiebreak_cells = Selectors(texts);
  texts = SelectorTexts(cfg.full_p0_cells);
  r.Get("full_p0_cells", texts);
  cfg.full_p0_cells = Selectors(texts);
  r.Get("query_budgets", cfg.query_budgets);
  texts = SelectorTexts(cfg.query_cells);
  r.Get("query_cells", texts);
  cfg.query_cells = Selectors(texts);
  if (const json* sens = r.Child("sensitivity")) {
    Reader s(*sens, "sensitivity");
    SensitivityConfig& sc = cfg.sensitivity;
    s.Get("feature_sets", sc.feature_sets);
    s.Get("schedule", sc.schedule);
    sc.surface_scales = RationalList(s.Child("surface_scales"),
                                     "sensitivity.surface_scales",
                                     sc.surface_scales);
    sc.semi_domain_scales = RationalList(s.Child("semi_domain_scales"),
                                         "sensitivity.semi_domain_scales",
                                         sc.semi_domain_scales);
    sc.infrastructure_scales = RationalList(
        s.Child("infrastructure_scales"), "sensitivity.infrastructure_scales",
        sc.infrastructure_scales);
    s.Get("reclassify_feature", sc.reclassify_feature);
    if (const json* groups = s.Child("reclassify_groups")) {
      if (!groups->is_array()) Bad("reclassify_groups must be an array");
      sc.reclassify_groups.clear();
      for (const json& g : *groups) {
        auto group = g.is_string() ? ParseGroup(g.get<std::string>())
                                   : std::nullopt;
        if (!group) Bad("unknown group in reclassify_groups");
        sc.reclassify_groups.push_back(*group);
      }
    }
    s.Get("noise_draws", sc.noise_draws);
    s.Finish();
  }
  if (const json* strat = r.Child("stratify")) {
    Reader s(*strat, "stratify");
    s.Get("feature_set", cfg.stratify.feature_set);
    s.Get("schedule", cfg.stratify.schedule);
    s.Get("feature", cfg.stratify.feature);
    s.Finish();
  }
  r.Finish();

  if (cfg.b_max < 1) Bad("b_max must be >= 1");
  if (cfg.n_eval < 1) Bad("n_eval must be >= 1");
  if (cfg.split.test_fraction <= Rational(0) ||
      cfg.split.test_fraction >= Rational(1)) {
    Bad("split.test_fraction must lie strictly between 0 and 1");
  }
  if (cfg.bootstrap_resamples < 0) Bad("bootstrap_resamples must be >= 0");
  if (cfg.tiebreak_orders < 1) Bad("tiebreak_orders must be >= 1");
  if (cfg.sensitivity.noise_draws < 0) Bad("noise_draws must be >= 0");
  for (std::int64_t q : cfg.query_budgets) {
    if (q < 1) Bad("query budgets must be positive");
  }
  for (const Rational& s : cfg.sensitivity.surface_scales) {
    if (s <= Rational(0)) Bad("scale factors must be positive");
  }
  if (cfg.models.empty()) Bad("at least one model is required");
  cfg.split.seed = cfg.seeds.split;
  return cfg;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::string text;
  try {
    text = internal::ReadFile(path);
  } catch (const Error&) {
    throw Error(ErrorCode::kConfigError, "cannot read config " + path);
  }
  return ParseExperimentConfig(text);
}

std::string ExperimentConfigJson(const ExperimentConfig& cfg) {
  json j;
  j["dataset"] = cfg.dataset;
  j["label_column"] = cfg.label_column;
  j["strict_parsing"] = cfg.strict_parsing;
  j["feature_config"] = cfg.feature_config;
  j["split"] = {{"test_fraction", RationalToJson(cfg.split.test_fraction)},
                {"stratified", cfg.split.stratified}};
  j["feature_sets"] = cfg.feature_sets;
  j["schedules"] = cfg.schedules;
  json models = json::array();
  for (ModelFamily m : cfg.models) models.push_back(std::string(FamilyName(m)));
  j["models"] = models;
  j["n_eval"] = cfg.n_eval;
  j["b_max"] = cfg.b_max;
  j["seeds"] = {{"split", cfg.seeds.split},       {"model", cfg.seeds.model},
                {"sample", cfg.seeds.sample},     {"bootstrap", cfg.seeds.bootstrap},
                {"tiebreak", cfg.seeds.tiebreak}, {"noise", cfg.seeds.noise}};
  j["bootstrap_resamples"] = cfg.bootstrap_resamples;
  j["tiebreak_orders"] = cfg.tiebreak_orders;
  j["tiebreak_cells"] = SelectorTexts(cfg.tiebreak_cells);
  j["full_p0_cells"] = SelectorTexts(cfg.full_p0_cells);
  j["query_budgets"] = cfg.query_budgets;
  j["query_cells"] = SelectorTexts(cfg.query_cells);
  const SensitivityConfig& sc = cfg.sensitivity;
  auto rationals = [](const std::vector<Rational>& v) {
    json a = json::array();
    for (const Rational& r : v) a.push_back(RationalToJson(r));
    return a;
  };
  json groups = json::array();
  for (FeatureGroup g : sc.reclassify_groups) {
    groups.push_back(std::string(GroupName(g)));
  }
  j["sensitivity"] = {{"feature_sets", sc.feature_sets},
                      {"schedule", sc.schedule},
                      {"surface_scales", rationals(sc.surface_scales)},
                      {"semi_domain_scales", rationals(sc.semi_domain_scales)},
                      {"infrastructure_scales",
                       rationals(sc.infrastructure_scales)},
                      {"reclassify_feature", sc.reclassify_feature},
                      {"reclassify_groups", groups},
                      {"noise_draws", sc.noise_draws}};
  j["stratify"] = {{"feature_set", cfg.stratify.feature_set},
                   {"schedule", cfg.stratify.schedule},
                   {"feature", cfg.stratify.feature}};
  return j.dump(2);
}

std::string ConfigHash(const ExperimentConfig& config) {
  internal::Fnv1a h;
  h.Update(ExperimentConfigJson(config));
  return h.Hex();
}

std::size_t FeatureSetRun::ModelIndex(ModelFamily family) const {
  for (std::size_t i = 0; i < families.size(); ++i) {
    if (families[i] == family) return i;
  }
  throw Error(ErrorCode::kConfigError,
              "model " + std::string(FamilyName(family)) + " not trained");
}

std::vector<std::vector<FeatureValue>> FeatureSetRun::Rows(
    std::span<const std::size_t> ids) const {
  std::vector<std::vector<FeatureValue>> rows;
  rows.reserve(ids.size());
  for (std::size_t id : ids) {
    auto r = test.row(test.PositionOf(id));
    rows.emplace_back(r.begin(), r.end());
  }
  return rows;
}

CellMetrics ComputeCellMetrics(std::span<const EvasionResult> results,
                               std::size_t dim, const Cost& c_min,
                               std::int64_t b_max, int resamples,
                               std::uint64_t seed) {
  const MecDistribution dist = MecDistribution::FromResults(results);
  CellMetrics m;
  m.n = dist.n();
  m.infinite = dist.infinite_count();
  m.noev = dist.NoEvasionFraction();
  m.fri = Fri(dist, b_max);
  m.fri_by_instance = FriByInstance(dist, b_max);
  if (!dist.finite_sorted().empty()) m.quartiles = QuantilesFinite(dist);
  m.c_min = c_min;
  m.alpha_hat = AlphaAtCostFloor(dist, c_min);
  m.cost_floor_bound_holds = CostFloorBoundHolds(dist, c_min);
  try {
    m.concentration = Concentration(results, dim);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoSuccessfulTraces) throw;
  }
  m.survival = SurvivalCurve(dist, b_max);
  if (resamples > 0) {
    std::vector<StatisticSpec> stats;
    stats.push_back({Statistic::kFri, 3, Cost(2), b_max});
    if (m.quartiles) stats.push_back({Statistic::kMedianMec, 3, Cost(2), b_max});
    if (m.concentration) stats.push_back({Statistic::kRci, 3, Cost(2), b_max});
    for (const StatisticSpec& s : stats) {
      m.cis.push_back(Bootstrap(results, dim, s, resamples,
                                DeriveSeed(seed, s.Name())));
    }
  }
  return m;
}

std::string CellReport::Key() const {
  return feature_set + "_" + schedule + "_" + std::string(FamilyName(model));
}

bool GridReport::partial() const {
  return std::any_of(cells.begin(), cells.end(),
                     [](const CellReport& c) { return c.error.has_value(); });
}

Experiment::Experiment(ExperimentConfig config, unsigned workers)
    : config_(std::move(config)), workers_(workers) {
  if (config_.dataset.empty()) Bad("no dataset given");
  config_.dataset = std::filesystem::absolute(config_.dataset).string();
  if (!config_.feature_config.empty()) {
    config_.feature_config =
        std::filesystem::absolute(config_.feature_config).string();
    feature_config_ = LoadFeatureConfig(config_.feature_config);
  }
  LoadOptions options;
  options.label_column = config_.label_column;
  options.strict = config_.strict_parsing;
  for (const auto& [name, group] : feature_config_.groups) {
    options.groups[name] = group;
  }
  LoadedData loaded = LoadDataset(config_.dataset, options);
  dropped_rows_ = loaded.dropped_rows;
  Prepare(std::move(loaded.dataset));
}

Experiment::Experiment(ExperimentConfig config, LabeledDataset dataset,
                       unsigned workers)
    : config_(std::move(config)), workers_(workers) {
  if (!config_.feature_config.empty()) {
    feature_config_ = LoadFeatureConfig(config_.feature_config);
    dataset = dataset.WithSchema(std::make_shared<const FeatureSchema>(
        ApplyGroupMap(dataset.schema(), feature_config_.groups)));
  }
  Prepare(std::move(dataset));
}

void Experiment::Prepare(LabeledDataset dataset) {
  dataset_ = std::move(dataset);
  const std::size_t phish = dataset_.CountLabel(Label::kPhishing);
  if (phish == 0 || phish == dataset_.size()) {
    throw Error(ErrorCode::kDegenerateData, "dataset must hold both classes");
  }
  dataset_hash_ = DatasetHash(dataset_);
  SplitSpec spec = config_.split;
  spec.seed = config_.seeds.split;
  split_ = StratifiedSplit(dataset_, spec);
  for (const std::string& s : config_.schedules) Schedule(s);
  Schedule(config_.sensitivity.schedule);
  for (const std::string& fs : config_.feature_sets) {
    if (!feature_config_.FindSet(fs) && !BuiltinArity(fs)) {
      Bad("unknown feature set '" + fs + "'");
    }
  }
}

const CostSchedule& Experiment::Schedule(const std::string& name) {
  auto it = schedules_.find(name);
  if (it == schedules_.end()) {
    it = schedules_.emplace(name, ResolveSchedule(name)).first;
  }
  return it->second;
}

FeatureSetConfig Experiment::ResolveFeatureSet(const std::string& name) const {
  if (const FeatureSetConfig* listed = feature_config_.FindSet(name)) {
    ValidateFeatureSet(dataset_.schema(), *listed);
    return *listed;
  }
  if (BuiltinArity(name)) {
    FeatureSetConfig cfg = DeriveFeatureSet(name, split_.train);
    ValidateFeatureSet(dataset_.schema(), cfg);
    return cfg;
  }
  Bad("unknown feature set '" + name + "'");
}

const FeatureSetRun& Experiment::FeatureSet(const std::string& name) {
  auto it = runs_.find(name);
  if (it != runs_.end()) return *it->second;
  auto run = std::make_unique<FeatureSetRun>();
  run->set = ResolveFeatureSet(name);
  run->train = split_.train.Project(run->set);
  run->schema = run->train.schema_ptr();
  run->test = split_.test.Project(run->set).WithSchema(run->schema);
  for (ModelFamily family : config_.models) {
    run->families.push_back(family);
    run->models.push_back(
        Train(ModelSpec::Default(family, config_.seeds.model), run->train));
    run->iid.push_back(EvaluateIid(run->models.back(), run->test));
    run->p0.push_back(BuildConditioningSet(
        run->models.back(), std::string(FamilyName(family)), run->test));
  }
  run->intersection_size = Intersect(run->p0).size();
  try {
    run->sample_ids = IntersectionSample(run->p0, config_.n_eval,
                                         DeriveSeed(config_.seeds.sample, name));
    run->sample = run->Rows(run->sample_ids);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientIntersection) throw;
    run->error = Describe(e);
  }
  return *runs_.emplace(name, std::move(run)).first->second;
}

const std::vector<EvasionResult>& Experiment::ExactResults(
    const std::string& feature_set, const std::string& schedule,
    ModelFamily model) {
  const std::string key =
      feature_set + "|" + schedule + "|" + std::string(FamilyName(model));
  auto it = exact_cache_.find(key);
  if (it != exact_cache_.end()) return it->second;
  const FeatureSetRun& run = FeatureSet(feature_set);
  if (run.error) throw Error(ErrorCode::kInsufficientIntersection, *run.error);
  std::vector<EvasionResult> results =
      BatchEvaluate(run.models[run.ModelIndex(model)], Schedule(schedule),
                    *run.schema, run.sample,
                    AttackerConfig::Exact(Cost(config_.b_max)), workers_);
  return exact_cache_.emplace(key, std::move(results)).first->second;
}

GridReport Experiment::RunMainGrid() {
  GridReport report;
  for (const std::string& fs : config_.feature_sets) {
    FeatureSetSummary summary;
    summary.name = fs;
    const FeatureSetRun* run = nullptr;
    try {
      run = &FeatureSet(fs);
      summary.members = run->set.members;
      summary.intersection_size = run->intersection_size;
      summary.sample_ids = run->sample_ids;
      summary.error = run->error;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kConfigError ||
          e.code() == ErrorCode::kUnknownFeature) {
        throw;
      }
      summary.error = Describe(e);
    }
    report.feature_sets.push_back(summary);
    for (const std::string& sched : config_.schedules) {
      for (ModelFamily family : config_.models) {
        CellReport cell;
        cell.feature_set = fs;
        cell.schedule = sched;
        cell.model = family;
        if (run == nullptr || run->error) {
          cell.error = summary.error;
          if (run != nullptr) {
            const std::size_t m = run->ModelIndex(family);
            cell.iid = run->iid[m];
            cell.p0_size = run->p0[m].ids.size();
            cell.intersection_size = run->intersection_size;
          }
          report.cells.push_back(std::move(cell));
          continue;
        }
        const std::size_t m = run->ModelIndex(family);
        const CostSchedule& schedule = Schedule(sched);
        cell.iid = run->iid[m];
        cell.p0_size = run->p0[m].ids.size();
        cell.intersection_size = run->intersection_size;
        cell.features = run->set.members;
        cell.schema = run->schema;
        cell.instance_ids = run->sample_ids;
        try {
          cell.results = ExactResults(fs, sched, family);
          const Cost c_min = MinTransitionCost(schedule, *run->schema);
          const std::string key = cell.Key();
          cell.metrics = ComputeCellMetrics(
              cell.results, run->schema->size(), c_min, config_.b_max,
              config_.bootstrap_resamples,
              DeriveSeed(config_.seeds.bootstrap, key));
          if (Selected(config_.full_p0_cells, fs, sched)) {
            const auto rows = run->Rows(run->p0[m].ids);
            if (!rows.empty()) {
              const auto full = BatchEvaluate(
                  run->models[m], schedule, *run->schema, rows,
                  AttackerConfig::Exact(Cost(config_.b_max)), workers_);
              cell.full_p0 = ComputeCellMetrics(full, run->schema->size(),
                                                c_min, config_.b_max, 0, 0);
            }
          }
          if (Selected(config_.tiebreak_cells, fs, sched)) {
            cell.tiebreak = MeasureTiebreakStability(
                run->models[m], schedule, *run->schema, run->sample,
                Cost(config_.b_max), config_.tiebreak_orders,
                DeriveSeed(config_.seeds.tiebreak, key), workers_);
          }
        } catch (const Error& e) {
          if (e.code() == ErrorCode::kConfigError) throw;
          cell.error = Describe(e);
        }
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

namespace {

std::vector<std::string> TopNames(const std::vector<EvasionResult>& results,
                                  const FeatureSchema& schema,
                                  Rational* rci3) {
  try {
    const ConcentrationStats c = Concentration(results, schema.size());
    if (rci3) *rci3 = c.Rci(3);
    std::vector<std::string> names;
    for (std::size_t j : c.TopK(3)) {
      if (c.edit_counts[j] > 0) names.push_back(schema.feature(j).name);
    }
    return names;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoSuccessfulTraces) throw;
    if (rci3) *rci3 = Rational(0);
    return {};
  }
}

std::optional<Rational> FiniteMedian(const MecDistribution& dist) {
  if (dist.finite_sorted().empty()) return std::nullopt;
  return QuantilesFinite(dist).median;
}

}  // namespace

SensitivityReport Experiment::RunSensitivity() {
  SensitivityReport report;
  const SensitivityConfig& sc = config_.sensitivity;
  const CostSchedule& schedule = Schedule(sc.schedule);
  const AttackerConfig exact = AttackerConfig::Exact(Cost(config_.b_max));
  for (const std::string& fs : sc.feature_sets) {
    const FeatureSetRun* run = nullptr;
    try {
      run = &FeatureSet(fs);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kConfigError) throw;
      report.annotations.push_back(fs + ": " + Describe(e));
      continue;
    }
    if (run->error) {
      report.annotations.push_back(fs + ": " + *run->error);
      continue;
    }
    std::vector<std::pair<std::string, CostPerturbation>> perturbations;
    for (const Rational& f : sc.surface_scales) {
      perturbations.emplace_back("surface_scale",
                                 ScaleGroup{FeatureGroup::kSurface, f});
    }
    for (const Rational& f : sc.semi_domain_scales) {
      perturbations.emplace_back("semi_domain_scale",
                                 ScaleGroup{FeatureGroup::kSemiDomain, f});
    }
    for (const Rational& f : sc.infrastructure_scales) {
      perturbations.emplace_back("infrastructure_scale",
                                 ScaleGroup{FeatureGroup::kInfrastructure, f});
    }
    if (auto j = run->schema->IndexOf(sc.reclassify_feature)) {
      for (FeatureGroup g : sc.reclassify_groups) {
        if (run->schema->feature(*j).group == g) continue;
        perturbations.emplace_back("reclassify",
                                   ReclassifyFeature{sc.reclassify_feature, g});
      }
    } else if (!sc.reclassify_feature.empty()) {
      report.annotations.push_back(fs + ": " + sc.reclassify_feature +
                                   " not in feature set; reclassification "
                                   "skipped");
    }
    for (ModelFamily family : config_.models) {
      const TrainedModel& model = run->models[run->ModelIndex(family)];
      for (const auto& [kind, p] : perturbations) {
        const PerturbedCosts pc = ApplyPerturbation(schedule, *run->schema, p);
        const auto results = BatchEvaluate(model, pc.schedule, pc.schema,
                                           run->sample, exact, workers_);
        const MecDistribution dist = MecDistribution::FromResults(results);
        PerturbationRow row;
        row.feature_set = fs;
        row.model = family;
        row.kind = kind;
        row.perturbation = DescribePerturbation(p);
        row.median = FiniteMedian(dist);
        row.top3 = TopNames(results, pc.schema, &row.rci3);
        row.noev = dist.NoEvasionFraction();
        report.rows.push_back(std::move(row));
      }
      if (sc.noise_draws == 0) continue;
      std::vector<std::string> reference =
          TopNames(ExactResults(fs, sc.schedule, family), *run->schema, nullptr);
      std::sort(reference.begin(), reference.end());
      std::vector<double> rci, median;
      int agree = 0;
      for (int draw = 0; draw < sc.noise_draws; ++draw) {
        const RankPreservingNoise noise{
            DeriveSeed(config_.seeds.noise, static_cast<std::uint64_t>(draw))};
        const PerturbedCosts pc =
            ApplyPerturbation(schedule, *run->schema, noise);
        const auto results = BatchEvaluate(model, pc.schedule, pc.schema,
                                           run->sample, exact, workers_);
        Rational r;
        std::vector<std::string> top = TopNames(results, pc.schema, &r);
        std::sort(top.begin(), top.end());
        if (top == reference) ++agree;
        rci.push_back(r.ToDouble());
        const auto med = FiniteMedian(MecDistribution::FromResults(results));
        if (med) median.push_back(med->ToDouble());
      }
      NoiseSummary s;
      s.feature_set = fs;
      s.model = family;
      s.draws = sc.noise_draws;
      auto mean = [](const std::vector<double>& v) {
        double t = 0;
        for (double x : v) t += x;
        return v.empty() ? 0.0 : t / static_cast<double>(v.size());
      };
      s.rci3_mean = mean(rci);
      s.rci3_std = PopulationStdDev(rci);
      s.median_mean = mean(median);
      s.median_std = PopulationStdDev(median);
      s.top3_agreement = static_cast<double>(agree) / sc.noise_draws;
      report.noise.push_back(s);
    }
  }
  return report;
}

QueryBudgetReport Experiment::RunQueryBudget() {
  QueryBudgetReport report;
  for (const CellSelector& sel : config_.query_cells) {
    const FeatureSetRun* run = nullptr;
    try {
      run = &FeatureSet(sel.feature_set);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kConfigError) throw;
      report.annotations.push_back(sel.Key() + ": " + Describe(e));
      continue;
    }
    if (run->error) {
      report.annotations.push_back(sel.Key() + ": " + *run->error);
      continue;
    }
    const CostSchedule& schedule = Schedule(sel.schedule);
    for (ModelFamily family : config_.models) {
      const auto& exact = ExactResults(sel.feature_set, sel.schedule, family);
      auto make_row = [&](const std::vector<EvasionResult>& results,
                          std::optional<std::int64_t> q) {
        const MecDistribution dist = MecDistribution::FromResults(results);
        QueryBudgetRow row;
        row.feature_set = sel.feature_set;
        row.schedule = sel.schedule;
        row.model = family;
        row.query_budget = q;
        row.attacker = q ? "greedy-Q" + std::to_string(*q) : "exact";
        row.s2 = Survival(dist, Cost(2));
        row.s4 = Survival(dist, Cost(4));
        row.survival = SurvivalCurve(dist, config_.b_max);
        for (std::size_t i = 0; i < results.size(); ++i) {
          if (results[i].mec < exact[i].mec) row.dominates_exact = false;
        }
        return row;
      };
      const TrainedModel& model = run->models[run->ModelIndex(family)];
      for (std::int64_t q : config_.query_budgets) {
        const auto greedy = BatchEvaluate(
            model, schedule, *run->schema, run->sample,
            AttackerConfig::Greedy(q, Cost(config_.b_max)), workers_);
        report.rows.push_back(make_row(greedy, q));
      }
      report.rows.push_back(make_row(exact, std::nullopt));
    }
  }
  return report;
}

StratifiedReport Experiment::RunStratified() {
  const StratifyConfig& st = config_.stratify;
  StratifiedReport report;
  report.feature_set = st.feature_set;
  report.schedule = st.schedule;
  report.feature = st.feature;
  const FeatureSetRun& run = FeatureSet(st.feature_set);
  const auto j = run.schema->IndexOf(st.feature);
  if (!j) {
    throw Error(ErrorCode::kUnknownFeature,
                "'" + st.feature + "' is not in feature set " + st.feature_set);
  }
  if (run.error) {
    report.annotations.push_back(st.feature_set + ": " + *run.error);
    return report;
  }
  std::vector<std::pair<std::string, std::vector<EvasionResult>>> groups;
  std::vector<EvasionResult> pooled;
  for (ModelFamily family : config_.models) {
    const auto& results = ExactResults(st.feature_set, st.schedule, family);
    groups.emplace_back(std::string(FamilyName(family)), results);
    pooled.insert(pooled.end(), results.begin(), results.end());
  }
  groups.emplace_back("pooled", pooled);
  for (const auto& [name, results] : groups) {
    for (int v = -1; v <= 1; ++v) {
      std::vector<Cost> mec;
      for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& row = run.sample[i % run.sample.size()];
        if (ToInt(row[*j]) == v) mec.push_back(results[i].mec);
      }
      if (mec.empty()) {
        report.annotations.push_back(name + ": stratum " + st.feature + "=" +
                                     std::to_string(v) + " is empty");
        continue;
      }
      const MecDistribution dist(std::move(mec));
      Stratum s;
      s.model = name;
      s.initial_value = v;
      s.n = dist.n();
      s.survival = SurvivalCurve(dist, config_.b_max);
      s.median = FiniteMedian(dist);
      report.strata.push_back(std::move(s));
    }
  }
  return report;
}

}  // namespace phishcost
