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

#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "internal.h"
#include "phishcost/experiment.h"

namespace phishcost {

using json = nlohmann::ordered_json;

namespace {

json RationalJson(const Rational& r) { return r.ToDouble(); }

json CostJson(const Cost& c) {
  if (c.is_infinite()) return "inf";
  if (c.value().is_integer()) return c.value().num();
  return c.value().ToString();
}

json OptionalRational(const std::optional<Rational>& r) {
  return r ? json(r->ToDouble()) : json(nullptr);
}

json CurveJson(const std::vector<SurvivalPoint>& curve) {
  json a = json::array();
  for (const SurvivalPoint& p : curve) a.push_back(p.survival.ToDouble());
  return a;
}

json CiJson(const BootstrapCi& ci) {
  return {{"point", ci.point},         {"lower", ci.lower},
          {"upper", ci.upper},         {"resamples", ci.resamples},
          {"skipped", ci.skipped},     {"seed", ci.seed}};
}

json MetricsJson(const CellMetrics& m, const std::vector<std::string>& names) {
  json j;
  j["n"] = m.n;
  j["noev"] = RationalJson(m.noev);
  j["infinite"] = m.infinite;
  j["fri"] = RationalJson(m.fri);
  j["fri_exact"] = m.fri.ToString();
  j["fri_routes_agree"] = m.fri == m.fri_by_instance;
  j["median_mec"] = m.quartiles ? json(m.quartiles->median.ToDouble()) : json();
  j["q1"] = m.quartiles ? json(m.quartiles->q1.ToDouble()) : json();
  j["q3"] = m.quartiles ? json(m.quartiles->q3.ToDouble()) : json();
  j["c_min"] = CostJson(m.c_min);
  j["alpha_hat"] = RationalJson(m.alpha_hat);
  j["cost_floor_bound_holds"] = m.cost_floor_bound_holds;
  if (m.concentration) {
    const ConcentrationStats& c = *m.concentration;
    j["rci_1"] = c.Rci(1).ToDouble();
    j["rci_3"] = c.Rci(3).ToDouble();
    j["rci_5"] = c.Rci(5).ToDouble();
    j["first_top1"] = c.first_top1.ToDouble();
    j["top_first_feature"] = names[c.top_first_feature];
    json top = json::array();
    for (std::size_t f : c.TopK(3)) top.push_back(names[f]);
    j["top3_features"] = top;
    json counts = json::object();
    for (std::size_t f : c.ranking) {
      if (c.edit_counts[f] > 0) counts[names[f]] = c.edit_counts[f];
    }
    j["edit_counts"] = counts;
    json first = json::object();
    for (std::size_t f = 0; f < names.size(); ++f) {
      if (c.first_edit_counts[f] > 0) first[names[f]] = c.first_edit_counts[f];
    }
    j["first_edit_counts"] = first;
  } else {
    j["rci_3"] = nullptr;
    j["first_top1"] = nullptr;
  }
  j["survival"] = CurveJson(m.survival);
  json cis = json::object();
  for (const BootstrapCi& ci : m.cis) cis[ci.statistic] = CiJson(ci);
  j["ci"] = cis;
  return j;
}

std::string FormatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string GridJson(const Experiment& experiment, const GridReport& grid) {
  json j;
  j["format"] = "phishcost.grid";
  j["version"] = 1;
  j["config_hash"] = ConfigHash(experiment.config());
  j["dataset_hash"] = experiment.dataset_hash();
  j["b_max"] = experiment.config().b_max;
  j["n_eval"] = experiment.config().n_eval;
  const DataSplit& split = experiment.split();
  j["split"] = {{"train", split.train.size()},
                {"test", split.test.size()},
                {"test_phishing", split.test.CountLabel(Label::kPhishing)}};
  json sets = json::array();
  for (const FeatureSetSummary& s : grid.feature_sets) {
    sets.push_back({{"name", s.name},
                    {"members", s.members},
                    {"intersection_size", s.intersection_size},
                    {"sample_ids", s.sample_ids},
                    {"error", s.error ? json(*s.error) : json()}});
  }
  j["feature_sets"] = sets;
  json cells = json::array();
  for (const CellReport& c : grid.cells) {
    json cell;
    cell["feature_set"] = c.feature_set;
    cell["schedule"] = c.schedule;
    cell["model"] = std::string(FamilyName(c.model));
    cell["model_label"] = std::string(FamilyLabel(c.model));
    cell["error"] = c.error ? json(*c.error) : json();
    cell["accuracy"] = c.iid.accuracy;
    cell["auc"] = c.iid.auc;
    cell["phishing_tpr"] = c.iid.phishing_tpr;
    cell["p0_size"] = c.p0_size;
    cell["intersection_size"] = c.intersection_size;
    if (!c.error) {
      cell["metrics"] = MetricsJson(c.metrics, c.features);
      if (c.full_p0) cell["full_p0"] = MetricsJson(*c.full_p0, c.features);
      if (c.tiebreak) {
        cell["tiebreak"] = {{"orders", c.tiebreak->rci3.size()},
                            {"rci_3", c.tiebreak->rci3},
                            {"std", c.tiebreak->std_dev},
                            {"mec_identical", c.tiebreak->mec_identical}};
      }
    }
    cells.push_back(std::move(cell));
  }
  j["cells"] = cells;
  j["partial"] = grid.partial();
  return j.dump(2) + "\n";
}

std::string SensitivityJson(const SensitivityReport& report) {
  json j;
  j["format"] = "phishcost.sensitivity";
  j["version"] = 1;
  json rows = json::array();
  for (const PerturbationRow& r : report.rows) {
    rows.push_back({{"feature_set", r.feature_set},
                    {"model", std::string(FamilyName(r.model))},
                    {"kind", r.kind},
                    {"perturbation", r.perturbation},
                    {"median_mec", OptionalRational(r.median)},
                    {"rci_3", r.rci3.ToDouble()},
                    {"top3_features", r.top3},
                    {"noev", r.noev.ToDouble()}});
  }
  j["rows"] = rows;
  json noise = json::array();
  for (const NoiseSummary& s : report.noise) {
    noise.push_back({{"feature_set", s.feature_set},
                     {"model", std::string(FamilyName(s.model))},
                     {"draws", s.draws},
                     {"rci_3_mean", s.rci3_mean},
                     {"rci_3_std", s.rci3_std},
                     {"median_mean", s.median_mean},
                     {"median_std", s.median_std},
                     {"top3_agreement", s.top3_agreement}});
  }
  j["noise"] = noise;
  j["annotations"] = report.annotations;
  return j.dump(2) + "\n";
}

std::string QueryBudgetJson(const QueryBudgetReport& report) {
  json j;
  j["format"] = "phishcost.query_budget";
  j["version"] = 1;
  json rows = json::array();
  for (const QueryBudgetRow& r : report.rows) {
    rows.push_back({{"feature_set", r.feature_set},
                    {"schedule", r.schedule},
                    {"model", std::string(FamilyName(r.model))},
                    {"attacker", r.attacker},
                    {"query_budget", r.query_budget ? json(*r.query_budget)
                                                    : json()},
                    {"s2", r.s2.ToDouble()},
                    {"s4", r.s4.ToDouble()},
                    {"dominates_exact", r.dominates_exact},
                    {"survival", CurveJson(r.survival)}});
  }
  j["rows"] = rows;
  j["annotations"] = report.annotations;
  return j.dump(2) + "\n";
}

std::string StratifiedJson(const StratifiedReport& report) {
  json j;
  j["format"] = "phishcost.stratified";
  j["version"] = 1;
  j["feature_set"] = report.feature_set;
  j["schedule"] = report.schedule;
  j["feature"] = report.feature;
  json strata = json::array();
  for (const Stratum& s : report.strata) {
    strata.push_back({{"model", s.model},
                      {"initial_value", s.initial_value},
                      {"n", s.n},
                      {"median_mec", OptionalRational(s.median)},
                      {"survival", CurveJson(s.survival)}});
  }
  j["strata"] = strata;
  j["annotations"] = report.annotations;
  return j.dump(2) + "\n";
}

std::string SurvivalCsv(std::span<const SurvivalPoint> curve) {
  std::string out = "B,S\n";
  for (const SurvivalPoint& p : curve) {
    out += std::to_string(p.budget) + "," + FormatDouble(p.survival.ToDouble()) +
           "\n";
  }
  return out;
}

std::string NowUtc() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> EmitReport(const Experiment& experiment,
                                    const RunArtifacts& artifacts,
                                    const std::string& out_dir,
                                    const std::string& started_at) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot create " + out_dir + ": " + ec.message());
  }
  std::vector<std::string> files;
  auto write = [&](const std::string& name, std::string_view contents) {
    internal::WriteFile((fs::path(out_dir) / name).string(), contents);
    files.push_back(name);
  };

  if (artifacts.grid != nullptr) {
    write("grid.json", GridJson(experiment, *artifacts.grid));
    for (const CellReport& c : artifacts.grid->cells) {
      if (c.error) continue;
      write("survival_" + c.Key() + ".csv", SurvivalCsv(c.metrics.survival));
      const FeatureSchema& schema = *c.schema;
      std::string lines;
      for (std::size_t i = 0; i < c.results.size(); ++i) {
        lines += TraceJsonLine(c.instance_ids[i], c.results[i], schema) + "\n";
      }
      write("traces_" + c.Key() + ".jsonl", lines);
    }
  }
  if (artifacts.sensitivity != nullptr) {
    write("sensitivity.json", SensitivityJson(*artifacts.sensitivity));
  }
  if (artifacts.query_budget != nullptr) {
    write("query_budget.json", QueryBudgetJson(*artifacts.query_budget));
  }
  if (artifacts.stratified != nullptr) {
    write("stratified.json", StratifiedJson(*artifacts.stratified));
    for (const Stratum& s : artifacts.stratified->strata) {
      write("stratified_" + s.model + "_" + std::to_string(s.initial_value) +
                ".csv",
            SurvivalCsv(s.survival));
    }
  }
  write("split.json",
        SplitManifestJson(experiment.split(), experiment.dataset_hash()) + "\n");

  json manifest;
  manifest["format"] = "phishcost.manifest";
  manifest["version"] = 1;
  manifest["tool_version"] = std::string(kVersion);
  manifest["config"] = json::parse(ExperimentConfigJson(experiment.config()));
  manifest["config_hash"] = ConfigHash(experiment.config());
  manifest["dataset_hash"] = experiment.dataset_hash();
  manifest["dataset_rows"] = experiment.dataset().size();
  manifest["dropped_rows"] = experiment.dropped_rows();
  manifest["workers"] = experiment.workers();
  manifest["started_at"] = started_at;
  manifest["finished_at"] = NowUtc();
  manifest["files"] = files;
  files.push_back("manifest.json");
  internal::WriteFile((fs::path(out_dir) / "manifest.json").string(),
                      manifest.dump(2) + "\n");
  return files;
}

}  // namespace phishcost
