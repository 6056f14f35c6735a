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

// Command-line driver for the phishcost experiment pipeline.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phishcost/error.h"
#include "phishcost/experiment.h"
#include "phishcost/feature_schema.h"
#include "phishcost/model.h"

namespace {

using phishcost::Error;
using phishcost::ErrorCode;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitPartial = 4;

struct Flags {
  std::string dataset;
  std::string config;
  std::string out = "phishcost-out";
  std::string feature_config;
  std::string label_column;
  bool lenient = false;
  unsigned workers = 1;
  std::vector<std::string> feature_sets;
  std::vector<std::string> schedules;
  std::vector<std::string> models;
  std::optional<std::uint64_t> seed_split, seed_model, seed_sample,
      seed_bootstrap, seed_tiebreak, seed_noise;
  std::optional<std::size_t> n_eval;
  std::optional<std::int64_t> b_max;
  std::optional<int> resamples;
  std::string stratify_feature;
};

void AddCommonFlags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--dataset", f.dataset, "Dataset CSV or ARFF file");
  cmd->add_option("--config", f.config,
                  "Experiment config JSON (or a run manifest.json)");
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--feature-config", f.feature_config,
                  "Feature-set and group-map file");
  cmd->add_option("--label-column", f.label_column, "Label column name");
  cmd->add_flag("--lenient", f.lenient,
                "Drop rows with non-ternary values instead of failing");
  cmd->add_option("--workers", f.workers,
                  "Worker threads for evasion search (0 = all cores)")
      ->capture_default_str();
  cmd->add_option("--feature-set", f.feature_sets, "Feature set (repeatable)");
  cmd->add_option("--schedule", f.schedules,
                  "Cost schedule name or file (repeatable)");
  cmd->add_option("--model", f.models, "Model family (repeatable)");
  cmd->add_option("--seed-split", f.seed_split, "Train/test split seed");
  cmd->add_option("--seed-model", f.seed_model, "Model training seed");
  cmd->add_option("--seed-sample", f.seed_sample, "Evaluation sample seed");
  cmd->add_option("--seed-bootstrap", f.seed_bootstrap, "Bootstrap seed");
  cmd->add_option("--seed-tiebreak", f.seed_tiebreak, "Tie-break order seed");
  cmd->add_option("--seed-noise", f.seed_noise, "Cost-noise seed");
  cmd->add_option("--n-eval", f.n_eval, "Evaluation sample size");
  cmd->add_option("--b-max", f.b_max, "Attacker budget ceiling");
  cmd->add_option("--resamples", f.resamples, "Bootstrap resamples");
}

phishcost::ExperimentConfig BuildConfig(const Flags& f) {
  phishcost::ExperimentConfig cfg;
  if (!f.config.empty()) cfg = phishcost::LoadExperimentConfig(f.config);
  if (!f.dataset.empty()) cfg.dataset = f.dataset;
  if (!f.feature_config.empty()) cfg.feature_config = f.feature_config;
  if (!f.label_column.empty()) cfg.label_column = f.label_column;
  if (f.lenient) cfg.strict_parsing = false;
  if (!f.feature_sets.empty()) cfg.feature_sets = f.feature_sets;
  if (!f.schedules.empty()) cfg.schedules = f.schedules;
  if (!f.models.empty()) {
    cfg.models.clear();
    for (const std::string& m : f.models) {
      auto family = phishcost::ParseFamily(m);
      if (!family) throw Error(ErrorCode::kConfigError, "unknown model " + m);
      cfg.models.push_back(*family);
    }
  }
  if (f.seed_split) cfg.seeds.split = *f.seed_split;
  if (f.seed_model) cfg.seeds.model = *f.seed_model;
  if (f.seed_sample) cfg.seeds.sample = *f.seed_sample;
  if (f.seed_bootstrap) cfg.seeds.bootstrap = *f.seed_bootstrap;
  if (f.seed_tiebreak) cfg.seeds.tiebreak = *f.seed_tiebreak;
  if (f.seed_noise) cfg.seeds.noise = *f.seed_noise;
  if (f.n_eval) cfg.n_eval = *f.n_eval;
  if (f.b_max) cfg.b_max = *f.b_max;
  if (f.resamples) cfg.bootstrap_resamples = *f.resamples;
  // Round-trip through the parser so flag overrides get the same checks.
  cfg = phishcost::ParseExperimentConfig(phishcost::ExperimentConfigJson(cfg));
  if (cfg.dataset.empty()) {
    throw Error(ErrorCode::kConfigError,
                "no dataset: pass --dataset or set it in --config");
  }
  return cfg;
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
    case ErrorCode::kUnknownFeature:
      return kExitConfig;
    default:
      return kExitData;
  }
}

std::string Fixed(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void PrintGrid(const phishcost::GridReport& grid) {
  std::printf("%-8s %-7s %-14s %6s %6s %6s %6s %6s %6s\n", "set", "sched",
              "model", "acc", "median", "FRI", "RCI3", "NoEv", "alpha");
  for (const phishcost::CellReport& c : grid.cells) {
    if (c.error) {
      std::printf("%-8s %-7s %-14s  error: %s\n", c.feature_set.c_str(),
                  c.schedule.c_str(),
                  std::string(phishcost::FamilyName(c.model)).c_str(),
                  c.error->c_str());
      continue;
    }
    const auto& m = c.metrics;
    std::printf(
        "%-8s %-7s %-14s %6s %6s %6s %6s %6s %6s\n", c.feature_set.c_str(),
        c.schedule.c_str(), std::string(phishcost::FamilyName(c.model)).c_str(),
        Fixed(c.iid.accuracy).c_str(),
        m.quartiles ? Fixed(m.quartiles->median.ToDouble(), 2).c_str() : "-",
        Fixed(m.fri.ToDouble()).c_str(),
        m.concentration ? Fixed(m.concentration->Rci(3).ToDouble()).c_str()
                        : "-",
        Fixed(m.noev.ToDouble()).c_str(), Fixed(m.alpha_hat.ToDouble()).c_str());
  }
}

void PrintFiles(const std::string& out, const std::vector<std::string>& files) {
  std::printf("wrote %zu files to %s\n", files.size(), out.c_str());
}

int RunTrain(const Flags& f) {
  namespace fs = std::filesystem;
  const std::string started = phishcost::NowUtc();
  phishcost::Experiment exp(BuildConfig(f), f.workers);
  fs::create_directories(f.out);
  phishcost::FeatureConfig frozen;
  frozen.groups.clear();
  for (const auto& spec : exp.dataset().schema().features()) {
    frozen.groups[spec.name] = spec.group;
  }
  std::printf("%-8s %-14s %6s %6s %6s %6s\n", "set", "model", "acc", "auc",
              "tpr", "|P0|");
  for (const std::string& name : exp.config().feature_sets) {
    const phishcost::FeatureSetRun& run = exp.FeatureSet(name);
    frozen.sets.push_back(run.set);
    for (std::size_t m = 0; m < run.models.size(); ++m) {
      const std::string family(phishcost::FamilyName(run.families[m]));
      const std::string file = "model_" + name + "_" + family + ".json";
      std::ofstream((fs::path(f.out) / file).string()) << run.models[m].ToJson()
                                                       << "\n";
      std::printf("%-8s %-14s %6s %6s %6s %6zu\n", name.c_str(),
                  family.c_str(), Fixed(run.iid[m].accuracy).c_str(),
                  Fixed(run.iid[m].auc).c_str(),
                  Fixed(run.iid[m].phishing_tpr).c_str(),
                  run.p0[m].ids.size());
    }
  }
  std::ofstream((fs::path(f.out) / "feature_sets.cfg").string())
      << phishcost::FormatFeatureConfig(frozen);
  std::ofstream((fs::path(f.out) / "split.json").string())
      << phishcost::SplitManifestJson(exp.split(), exp.dataset_hash()) << "\n";
  std::printf("models, feature_sets.cfg and split.json written to %s (%s)\n",
              f.out.c_str(), started.c_str());
  return kExitOk;
}

int RunAnalyses(const Flags& f, bool grid, bool sensitivity, bool query,
                bool stratify) {
  const std::string started = phishcost::NowUtc();
  phishcost::ExperimentConfig cfg = BuildConfig(f);
  if (stratify && !grid) {
    if (!f.feature_sets.empty()) cfg.stratify.feature_set = f.feature_sets[0];
    if (!f.schedules.empty()) cfg.stratify.schedule = f.schedules[0];
  }
  if (!f.stratify_feature.empty()) cfg.stratify.feature = f.stratify_feature;
  if (sensitivity && !grid && !f.feature_sets.empty()) {
    cfg.sensitivity.feature_sets = f.feature_sets;
  }
  if (query && !grid && !f.feature_sets.empty() && !f.schedules.empty()) {
    cfg.query_cells.clear();
    for (const std::string& s : f.feature_sets) {
      for (const std::string& t : f.schedules) {
        cfg.query_cells.push_back({s, t});
      }
    }
  }
  phishcost::Experiment exp(cfg, f.workers);
  std::optional<phishcost::GridReport> g;
  std::optional<phishcost::SensitivityReport> s;
  std::optional<phishcost::QueryBudgetReport> q;
  std::optional<phishcost::StratifiedReport> st;
  if (grid) {
    g = exp.RunMainGrid();
    PrintGrid(*g);
  }
  if (sensitivity) {
    s = exp.RunSensitivity();
    std::printf("sensitivity: %zu perturbation rows, %zu noise summaries\n",
                s->rows.size(), s->noise.size());
  }
  if (query) {
    q = exp.RunQueryBudget();
    std::printf("%-8s %-7s %-14s %-11s %6s %6s\n", "set", "sched", "model",
                "attacker", "S(2)", "S(4)");
    for (const auto& r : q->rows) {
      std::printf("%-8s %-7s %-14s %-11s %6s %6s\n", r.feature_set.c_str(),
                  r.schedule.c_str(),
                  std::string(phishcost::FamilyName(r.model)).c_str(),
                  r.attacker.c_str(), Fixed(r.s2.ToDouble(), 2).c_str(),
                  Fixed(r.s4.ToDouble(), 2).c_str());
    }
  }
  if (stratify) {
    st = exp.RunStratified();
    for (const auto& stratum : st->strata) {
      std::printf("%-14s %s=%+d n=%zu S(2)=%s S(%lld)=%s\n",
                  stratum.model.c_str(), st->feature.c_str(),
                  stratum.initial_value, stratum.n,
                  Fixed(stratum.survival[std::min<std::size_t>(
                                             2, stratum.survival.size() - 1)]
                            .survival.ToDouble(),
                        2)
                      .c_str(),
                  static_cast<long long>(stratum.survival.back().budget),
                  Fixed(stratum.survival.back().survival.ToDouble(), 2)
                      .c_str());
    }
  }
  phishcost::RunArtifacts artifacts;
  artifacts.grid = g ? &*g : nullptr;
  artifacts.sensitivity = s ? &*s : nullptr;
  artifacts.query_budget = q ? &*q : nullptr;
  artifacts.stratified = st ? &*st : nullptr;
  PrintFiles(f.out, phishcost::EmitReport(exp, artifacts, f.out, started));
  if (g && g->partial()) return kExitPartial;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost-aware evasion robustness analysis for phishing detectors"};
  app.set_version_flag("--version", std::string(phishcost::kVersion));
  app.require_subcommand(1);

  Flags flags;
  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"train", "Train models per feature set; write models and frozen sets"},
      {"grid", "Main robustness grid (feature set x schedule x model)"},
      {"sensitivity", "Cost-perturbation sensitivity tables"},
      {"query-budget", "Greedy query-limited attacker versus exact search"},
      {"stratify", "Survival curves stratified by a feature's initial value"},
      {"report", "Run every analysis and write all artifacts"},
  };
  std::vector<CLI::App*> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    AddCommonFlags(sub, flags);
    subs.push_back(sub);
  }
  subs[4]->add_option("--feature", flags.stratify_feature,
                      "Stratification feature (default SSLfinal_State)");
  subs[5]->add_option("--feature", flags.stratify_feature,
                      "Stratification feature (default SSLfinal_State)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (subs[0]->parsed()) return RunTrain(flags);
    if (subs[1]->parsed()) return RunAnalyses(flags, true, false, false, false);
    if (subs[2]->parsed()) return RunAnalyses(flags, false, true, false, false);
    if (subs[3]->parsed()) return RunAnalyses(flags, false, false, true, false);
    if (subs[4]->parsed()) return RunAnalyses(flags, false, false, false, true);
    if (subs[5]->parsed()) return RunAnalyses(flags, true, true, true, true);
  } catch (const Error& e) {
    std::cerr << "phishcost: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "phishcost: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
