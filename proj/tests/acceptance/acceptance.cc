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


// Acceptance gate. Prints one verdict line per criterion.
//
//   acceptance --suite exact
//       criteria 1-6 on random toy lattices and a synthetic 30-feature
//       stand-in dataset
//   acceptance --suite reference
//       criteria 6-14 against reference values on the UCI Phishing Websites
//       data (--dataset or PHISHCOST_UCI_DATASET); exits 77 when the file
//       is not available

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "oracle.h"
#include "phishcost/error.h"
#include "phishcost/evasion.h"
#include "phishcost/experiment.h"
#include "phishcost/metrics.h"
#include "phishcost/random.h"
#include "synthetic.h"

namespace phishcost {
namespace {

enum class Verdict { kPass, kFail, kUnverified };

class Report {
 public:
  void Add(int id, const std::string& title, Verdict v,
           const std::string& detail) {
    const char* tag = v == Verdict::kPass   ? "[PASS]      "
                      : v == Verdict::kFail ? "[FAIL]      "
                                            : "[UNVERIFIED]";
    std::printf("%s %2d %s: %s\n", tag, id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (v == Verdict::kFail) ++failed_;
    if (v == Verdict::kUnverified) ++unverified_;
  }
  void Check(int id, const std::string& title, bool ok,
             const std::string& detail) {
    Add(id, title, ok ? Verdict::kPass : Verdict::kFail, detail);
  }
  int failed() const { return failed_; }
  int unverified() const { return unverified_; }

 private:
  int failed_ = 0;
  int unverified_ = 0;
};

std::string Fmt(const char* format, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

const CellReport* FindCell(const GridReport& grid, const std::string& fs,
                           const std::string& schedule, ModelFamily family) {
  for (const CellReport& c : grid.cells) {
    if (c.feature_set == fs && c.schedule == schedule && c.model == family &&
        !c.error) {
      return &c;
    }
  }
  return nullptr;
}

// Every state reachable on a toy schema that the model rejects.
std::vector<std::vector<FeatureValue>> RejectedStates(
    const testing::ToyCase& toy) {
  std::vector<std::vector<FeatureValue>> out;
  const std::size_t d = toy.schema->size();
  std::size_t states = 1;
  for (std::size_t j = 0; j < d; ++j) states *= 3;
  std::vector<FeatureValue> x(d);
  for (std::size_t code = 0; code < states; ++code) {
    std::size_t rest = code;
    bool admissible = true;
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = ToFeatureValue(static_cast<int>(rest % 3) - 1);
      rest /= 3;
      admissible = admissible && toy.schema->feature(j).admissible.Contains(x[j]);
    }
    if (admissible && toy.model.Predict(x) == Label::kPhishing) out.push_back(x);
  }
  return out;
}

bool SurvivalSound(const CellMetrics& m, std::string* why) {
  for (std::size_t b = 0; b < m.survival.size(); ++b) {
    if (m.survival[b].survival < m.noev) {
      *why = "S below NoEv";
      return false;
    }
    if (b > 0 && m.survival[b - 1].survival < m.survival[b].survival) {
      *why = "S increases";
      return false;
    }
  }
  if (m.fri != m.fri_by_instance) {
    *why = "FRI " + m.fri.ToString() + " vs " + m.fri_by_instance.ToString();
    return false;
  }
  return true;
}

// ---------------------------------------------------------------- exact ---

void RunExactSuite(Report& report, unsigned workers) {
  // 1. Exact search against exhaustive enumeration.
  {
    Rng rng(20260417);
    constexpr int kCases = 1500;
    int mismatches = 0, bad_traces = 0, feasible = 0;
    for (int i = 0; i < kCases; ++i) {
      testing::ToyCase toy = testing::RandomToyCase(rng);
      Cost expected = testing::BruteForceMec(toy.model, toy.schedule,
                                             *toy.schema, toy.x, toy.b_max);
      EvasionResult r =
          MecExact(toy.model, toy.schedule, *toy.schema, toy.x, toy.b_max);
      if (r.mec != expected) ++mismatches;
      if (r.mec.is_finite()) {
        ++feasible;
        std::vector<FeatureValue> y = ApplyTrace(toy.x, *r.trace);
        if (toy.model.Predict(y) != Label::kLegitimate || r.trace->total != r.mec) {
          ++bad_traces;
        }
      }
    }
    report.Check(1, "oracle equivalence", mismatches == 0 && bad_traces == 0,
                 std::to_string(kCases) + " toy cases (" +
                     std::to_string(feasible) + " feasible), " +
                     std::to_string(mismatches) + " mismatches, " +
                     std::to_string(bad_traces) + " invalid traces");
  }

  // Surrogate experiment shared by criteria 2-6.
  const LabeledDataset data =
      testing::SyntheticUci(testing::SyntheticOptions{11055, 1, 0.03});
  ExperimentConfig config;
  config.dataset = "synthetic-surrogate";
  const auto t0 = std::chrono::steady_clock::now();
  Experiment first(config, data, 1);
  GridReport grid = first.RunMainGrid();
  const double grid_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  // 2. Cost-floor bound on toy batches and grid cells.
  {
    Rng rng(4242);
    int batches = 0, binding = 0, violations = 0;
    for (int i = 0; i < 400; ++i) {
      testing::ToyCase toy = testing::RandomToyCase(rng);
      auto xs = RejectedStates(toy);
      if (xs.empty()) continue;
      auto results = BatchEvaluate(toy.model, toy.schedule, *toy.schema, xs,
                                   AttackerConfig::Exact(toy.b_max));
      MecDistribution dist = MecDistribution::FromResults(results);
      Cost c_min = MinTransitionCost(toy.schedule, *toy.schema);
      ++batches;
      if (AlphaAtCostFloor(dist, c_min) >= Rational(1, 2)) ++binding;
      if (!CostFloorBoundHolds(dist, c_min)) ++violations;
    }
    int cells = 0, cell_binding = 0;
    for (const CellReport& c : grid.cells) {
      if (c.error) continue;
      ++cells;
      MecDistribution dist = MecDistribution::FromResults(c.results);
      if (AlphaAtCostFloor(dist, c.metrics.c_min) >= Rational(1, 2)) {
        ++cell_binding;
      }
      if (!CostFloorBoundHolds(dist, c.metrics.c_min) ||
          !c.metrics.cost_floor_bound_holds) {
        ++violations;
      }
    }
    report.Check(2, "cost-floor bound", violations == 0 && cells > 0,
                 std::to_string(batches) + " toy batches (" +
                     std::to_string(binding) + " with alpha >= 1/2), " +
                     std::to_string(cells) + " surrogate grid cells (" +
                     std::to_string(cell_binding) + " with alpha >= 1/2), " +
                     std::to_string(violations) + " violations");
  }

  // 3. Survival shape and the two FRI computations.
  {
    int cells = 0, bad = 0;
    std::string why;
    for (const CellReport& c : grid.cells) {
      if (c.error) continue;
      ++cells;
      if (!SurvivalSound(c.metrics, &why)) ++bad;
      if (c.full_p0 && !SurvivalSound(*c.full_p0, &why)) ++bad;
    }
    Rng rng(31);
    int dists = 0;
    for (int i = 0; i < 1000; ++i, ++dists) {
      std::vector<Cost> v(1 + rng.Below(40));
      for (Cost& c : v) {
        c = rng.Below(6) == 0
                ? Cost::Infinite()
                : Cost(Rational(static_cast<std::int64_t>(rng.Below(80)), 4));
      }
      MecDistribution d(std::move(v));
      CellMetrics m;
      m.noev = d.NoEvasionFraction();
      m.survival = SurvivalCurve(d, 18);
      m.fri = Fri(d, 18);
      m.fri_by_instance = FriByInstance(d, 18);
      if (!SurvivalSound(m, &why)) ++bad;
    }
    report.Check(3, "survival monotonicity and plateau", bad == 0 && cells > 0,
                 std::to_string(cells) + " surrogate cells and " +
                     std::to_string(dists) + " random distributions, " +
                     std::to_string(bad) + " violations" +
                     (bad ? " (" + why + ")" : ""));
  }

  // 4. Greedy never beats exact.
  {
    QueryBudgetReport qb = first.RunQueryBudget();
    int rows = 0, bad = 0;
    for (const QueryBudgetRow& row : qb.rows) {
      if (!row.query_budget) continue;
      ++rows;
      if (!row.dominates_exact) ++bad;
    }
    Rng rng(777);
    int toys = 0;
    for (int i = 0; i < 1000; ++i) {
      testing::ToyCase toy = testing::RandomToyCase(rng);
      Cost exact =
          MecExact(toy.model, toy.schedule, *toy.schema, toy.x, toy.b_max).mec;
      for (std::int64_t q : {50, 100, 500}) {
        ++toys;
        if (MecGreedy(toy.model, toy.schedule, *toy.schema, toy.x, toy.b_max, q)
                .mec < exact) {
          ++bad;
        }
      }
    }
    report.Check(4, "greedy dominance", bad == 0 && rows > 0,
                 std::to_string(rows) + " surrogate (cell, model, Q) rows and " +
                     std::to_string(toys) + " toy (case, Q) pairs, " +
                     std::to_string(bad) + " violations");
  }

  // 5. Re-run from the serialized config with another worker count.
  {
    const std::string manifest =
        "{\"format\": \"phishcost.manifest\", \"config\": " +
        ExperimentConfigJson(config) + "}";
    const unsigned other = std::max(4u, workers);
    Experiment second(ParseExperimentConfig(manifest), data, other);
    const GridReport again = second.RunMainGrid();
    const std::string a = GridJson(first, grid);
    const std::string b = GridJson(second, again);
    report.Check(5, "determinism", a == b,
                 Fmt("full surrogate grid (%.0f cells, %.1f s) re-run from "
                     "manifest with %.0f workers: ",
                     static_cast<double>(grid.cells.size()), grid_seconds,
                     static_cast<double>(other)) +
                     (a == b ? "byte-identical" : "JSON differs"));
  }

  // 6. Tie-break orders on Full/base.
  {
    int checked = 0;
    bool ok = true;
    double worst = 0;
    for (ModelFamily f : config.models) {
      const CellReport* c = FindCell(grid, "Full", "base", f);
      if (!c || !c->tiebreak) {
        ok = false;
        continue;
      }
      ++checked;
      worst = std::max(worst, c->tiebreak->std_dev);
      ok = ok && c->tiebreak->mec_identical && c->tiebreak->std_dev < 0.05 &&
           c->tiebreak->rci3.size() == 10;
    }
    report.Check(6, "tie-break stability (surrogate)", ok && checked == 4,
                 std::to_string(checked) +
                     " models x 10 orders, MEC identical, max RCI_3 std " +
                     Fmt("%.4f", worst));
  }
}

// -------------------------------------------------------------- reference ---

const char* const kReferenceTitles[] = {
    "tie-break stability (UCI)", "iid model quality", "MEC table structure",
    "concentration",             "cost-floor mass",   "surface scaling law",
    "query-budget ordering",     "stratified tails",  "bootstrap intervals"};

struct IidTarget {
  ModelFamily family;
  double accuracy;
  double auc;
};

constexpr IidTarget kIidTargets[] = {
    {ModelFamily::kLogistic, 0.927, 0.979},
    {ModelFamily::kRandomForest, 0.950, 0.993},
    {ModelFamily::kGradientBoosting, 0.953, 0.990},
    {ModelFamily::kGradientBoostingVariant, 0.965, 0.995}};

struct CiWidth {
  ModelFamily family;
  double fri;
  double rci3;
};

constexpr CiWidth kReferenceWidths[] = {
    {ModelFamily::kLogistic, 0.016, 0.03},
    {ModelFamily::kRandomForest, 0.019, 0.07},
    {ModelFamily::kGradientBoosting, 0.014, 0.06},
    {ModelFamily::kGradientBoostingVariant, 0.018, 0.07}};

Rational Pooled(const GridReport& grid, const std::string& fs,
                const std::string& schedule, bool alpha) {
  std::int64_t num = 0, den = 0;
  for (const CellReport& c : grid.cells) {
    if (c.error || c.feature_set != fs || c.schedule != schedule) continue;
    MecDistribution d = MecDistribution::FromResults(c.results);
    Rational part = alpha ? AlphaAtCostFloor(d, c.metrics.c_min)
                          : d.NoEvasionFraction();
    num += (part * Rational(static_cast<std::int64_t>(d.n()))).num();
    den += static_cast<std::int64_t>(d.n());
  }
  return den == 0 ? Rational(-1) : Rational(num, den);
}

std::string MedianText(const CellReport* c) {
  if (!c) return "missing";
  if (!c->metrics.quartiles) return "none";
  return c->metrics.quartiles->median.ToString();
}

void RunReferenceSuite(Report& report, const std::string& dataset,
                   unsigned workers) {
  ExperimentConfig config;
  config.dataset = dataset;
  config.sensitivity.feature_sets = {"Full"};
  config.sensitivity.semi_domain_scales.clear();
  config.sensitivity.infrastructure_scales.clear();
  config.sensitivity.reclassify_feature.clear();
  config.sensitivity.noise_draws = 0;
  Experiment exp(config, workers);

  const auto t0 = std::chrono::steady_clock::now();
  const FeatureSetRun& full = exp.FeatureSet("Full");
  const double train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  GridReport grid = exp.RunMainGrid();

  // 6.
  {
    bool ok = true;
    double worst = 0;
    for (ModelFamily f : config.models) {
      const CellReport* c = FindCell(grid, "Full", "base", f);
      ok = ok && c && c->tiebreak && c->tiebreak->mec_identical &&
           c->tiebreak->std_dev < 0.05;
      if (c && c->tiebreak) worst = std::max(worst, c->tiebreak->std_dev);
    }
    report.Check(6, kReferenceTitles[0], ok,
                 "max RCI_3 std " + Fmt("%.4f", worst));
  }
  // 7.
  {
    bool ok = train_seconds < 300;
    std::string detail;
    for (const IidTarget& t : kIidTargets) {
      const IIDMetrics& m = full.iid[full.ModelIndex(t.family)];
      ok = ok && std::abs(m.accuracy - t.accuracy) <= 0.02 &&
           std::abs(m.auc - t.auc) <= 0.01;
      detail += std::string(FamilyName(t.family)) +
                Fmt(" %.3f/%.3f; ", m.accuracy, m.auc);
    }
    report.Check(7, kReferenceTitles[1], ok,
                 detail + Fmt("training %.1f s", train_seconds));
  }
  // 8.
  {
    bool ok = true;
    std::string detail;
    for (const char* sched : {"base", "strict"}) {
      for (ModelFamily f : config.models) {
        const CellReport* c = FindCell(grid, "Full", sched, f);
        ok = ok && c && c->metrics.quartiles &&
             c->metrics.quartiles->median == Rational(2);
      }
    }
    for (ModelFamily f : config.models) {
      const CellReport* c = FindCell(grid, "VA-7b", "base", f);
      detail += "VA-7b " + std::string(FamilyName(f)) + " " + MedianText(c) + "; ";
      ok = ok && c && c->metrics.quartiles &&
           c->metrics.quartiles->median == Rational(1);
    }
    for (const CellReport& c : grid.cells) {
      if (c.schedule == "base") ok = ok && !c.error && c.metrics.infinite == 0;
    }
    Rational noev = Pooled(grid, "RA-8", "strict", false);
    ok = ok && noev >= Rational(12, 100) && noev <= Rational(25, 100);
    report.Check(8, kReferenceTitles[2], ok,
                 detail + "RA-8/strict pooled NoEv " +
                     Fmt("%.3f", noev.ToDouble()));
  }
  // 9.
  {
    bool ok = true;
    std::string detail;
    for (ModelFamily f : config.models) {
      const CellReport* full_cell = FindCell(grid, "Full", "base", f);
      const CellReport* ra = FindCell(grid, "RA-8", "base", f);
      if (!full_cell || !ra || !full_cell->metrics.concentration ||
          !ra->metrics.concentration) {
        ok = false;
        continue;
      }
      const Rational rci = full_cell->metrics.concentration->Rci(3);
      const ConcentrationStats& s = *ra->metrics.concentration;
      const std::string top = ra->features[s.top_first_feature];
      ok = ok && rci >= Rational(3, 4) && s.first_top1 >= Rational(95, 100) &&
           top == "SSLfinal_State";
      detail += std::string(FamilyName(f)) +
                Fmt(" RCI_3 %.3f FirstTop1 %.3f ", rci.ToDouble(),
                    s.first_top1.ToDouble()) +
                top + "; ";
    }
    report.Check(9, kReferenceTitles[3], ok, detail);
  }
  // 10.
  {
    Rational full_alpha = Pooled(grid, "Full", "base", true);
    Rational va_alpha = Pooled(grid, "VA-7b", "base", true);
    bool ok = full_alpha >= Rational(1, 5) && full_alpha <= Rational(45, 100) &&
              va_alpha >= Rational(1, 2);
    report.Check(10, kReferenceTitles[4], ok,
                 Fmt("Full/base %.3f, VA-7b/base %.3f", full_alpha.ToDouble(),
                     va_alpha.ToDouble()));
  }
  // 11.
  {
    SensitivityReport s = exp.RunSensitivity();
    bool ok = true;
    int rows = 0;
    std::set<std::vector<std::string>> tops;
    std::string detail;
    for (const PerturbationRow& row : s.rows) {
      if (row.model != ModelFamily::kGradientBoosting ||
          row.kind != "surface_scale") {
        continue;
      }
      ++rows;
      const Rational lambda = config.sensitivity.surface_scales[rows - 1];
      ok = ok && row.median && *row.median == Rational(2) * lambda;
      std::vector<std::string> top = row.top3;
      std::sort(top.begin(), top.end());
      tops.insert(top);
      detail += (row.median ? row.median->ToString() : "none") + " ";
    }
    ok = ok && rows == 4 && tops.size() == 1;
    report.Check(11, kReferenceTitles[5], ok,
                 "medians " + detail + "top-3 sets " +
                     std::to_string(tops.size()));
  }
  // 12.
  {
    QueryBudgetReport qb = exp.RunQueryBudget();
    std::map<std::string, std::vector<const QueryBudgetRow*>> groups;
    for (const QueryBudgetRow& row : qb.rows) {
      groups[row.feature_set + "/" + row.schedule + "/" +
             std::string(FamilyName(row.model))]
          .push_back(&row);
    }
    bool ok = !groups.empty();
    double worst_gap = 0;
    for (auto& [key, rows] : groups) {
      std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) {
        auto qa = a->query_budget.value_or(INT64_MAX);
        auto qb2 = b->query_budget.value_or(INT64_MAX);
        return qa < qb2;
      });
      for (std::size_t i = 1; i < rows.size(); ++i) {
        ok = ok && rows[i]->s2 <= rows[i - 1]->s2 && rows[i]->s4 <= rows[i - 1]->s4;
      }
      const double gap = (rows.front()->s2 - rows.back()->s2).ToDouble();
      worst_gap = std::max(worst_gap, gap);
      ok = ok && !rows.back()->query_budget && gap <= 0.10;
    }
    report.Check(12, kReferenceTitles[6], ok,
                 std::to_string(groups.size()) +
                     Fmt(" cell/model groups, max Q50 gap at B=2 %.3f",
                         worst_gap));
  }
  // 13.
  {
    StratifiedReport sr = exp.RunStratified();
    bool ok = true, saw_blocked = false;
    std::string detail;
    for (const Stratum& s : sr.strata) {
      if (s.model != "pooled" || s.survival.empty()) continue;
      const double tail = s.survival.back().survival.ToDouble();
      detail += Fmt("x=%+.0f n=%.0f tail %.3f; ", s.initial_value,
                    static_cast<double>(s.n), tail);
      if (s.initial_value == 1) {
        saw_blocked = true;
        ok = ok && tail >= 0.25;
      } else {
        ok = ok && tail <= 0.05;
      }
    }
    report.Check(13, kReferenceTitles[7], ok && saw_blocked, detail);
  }
  // 14.
  {
    bool ok = true;
    std::string detail;
    for (const CiWidth& w : kReferenceWidths) {
      const CellReport* c = FindCell(grid, "Full", "base", w.family);
      if (!c) {
        ok = false;
        continue;
      }
      for (const BootstrapCi& ci : c->metrics.cis) {
        const double width = ci.upper - ci.lower;
        ok = ok && ci.lower <= ci.point && ci.point <= ci.upper &&
             ci.resamples == 200;
        if (ci.statistic == "fri") ok = ok && width <= 2 * w.fri;
        if (ci.statistic == "rci_3") ok = ok && width <= 2 * w.rci3;
        if (ci.statistic == "fri" || ci.statistic == "rci_3") {
          detail += std::string(FamilyName(w.family)) + " " + ci.statistic +
                    Fmt(" %.3f; ", width);
        }
      }
    }
    report.Check(14, kReferenceTitles[8], ok, "widths " + detail);
  }
}

}  // namespace
}  // namespace phishcost

int main(int argc, char** argv) {
  using phishcost::Report;
  CLI::App app{"phishcost acceptance criteria"};
  std::string suite = "exact";
  std::string dataset;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--suite", suite, "exact or reference")
      ->check(CLI::IsMember({"exact", "reference"}));
  app.add_option("--dataset", dataset, "UCI Phishing Websites CSV or ARFF");
  app.add_option("--workers", workers, "Worker threads");
  CLI11_PARSE(app, argc, argv);

  Report report;
  try {
    if (suite == "exact") {
      phishcost::RunExactSuite(report, workers);
    } else {
      if (dataset.empty()) {
        if (const char* env = std::getenv("PHISHCOST_UCI_DATASET")) {
          dataset = env;
        }
      }
      if (dataset.empty() || !std::filesystem::exists(dataset)) {
        const std::string why =
            dataset.empty() ? "no dataset given (--dataset or "
                              "PHISHCOST_UCI_DATASET)"
                            : "dataset not found: " + dataset;
        for (int id = 6; id <= 14; ++id) {
          report.Add(id, phishcost::kReferenceTitles[id - 6],
                     phishcost::Verdict::kUnverified, why);
        }
        return 77;
      }
      phishcost::RunReferenceSuite(report, dataset, workers);
    }
  } catch (const std::exception& e) {
    std::printf("[FAIL]       acceptance run aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d failed\n", report.failed());
  return report.failed() == 0 ? 0 : 1;
}
