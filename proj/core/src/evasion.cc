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

#include "phishcost/evasion.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <queue>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "phishcost/error.h"
#include "phishcost/random.h"

namespace phishcost {
namespace {

std::int64_t Gcd(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

std::int64_t Lcm(std::int64_t a, std::int64_t b) { return a / Gcd(a, b) * b; }

// Transition costs of one schema under one schedule, scaled to integers by
// the least common multiple of all denominators involved.
class ScaledCosts {
 public:
  ScaledCosts(const CostSchedule& schedule, const FeatureSchema& schema,
              const Cost& b_max) {
    scale_ = b_max.value().den();
    const std::size_t d = schema.size();
    for (std::size_t j = 0; j < d; ++j) {
      for (Step s : kAllSteps) {
        const Cost& c = schedule.at(schema.feature(j).group, s);
        if (c.is_finite()) scale_ = Lcm(scale_, c.value().den());
      }
    }
    budget_ = b_max.value().num() * (scale_ / b_max.value().den());
    table_.assign(d * 9, -1);
    for (std::size_t j = 0; j < d; ++j) {
      const ValueSet& adm = schema.feature(j).admissible;
      for (FeatureValue from : kAllValues) {
        for (FeatureValue to : kAllValues) {
          if (ToInt(to) <= ToInt(from) || !adm.Contains(to)) continue;
          const Cost c = TransitionCost(schedule, schema, j, from, to);
          if (c.is_infinite()) continue;
          table_[Slot(j, from, to)] =
              c.value().num() * (scale_ / c.value().den());
        }
      }
    }
  }

  // -1 when the move is unavailable.
  std::int64_t at(std::size_t j, FeatureValue from, FeatureValue to) const {
    return table_[Slot(j, from, to)];
  }
  std::int64_t budget() const { return budget_; }
  Rational Unscale(std::int64_t v) const { return Rational(v, scale_); }

 private:
  static std::size_t Slot(std::size_t j, FeatureValue from, FeatureValue to) {
    return j * 9 + static_cast<std::size_t>(ToInt(from) + 1) * 3 +
           static_cast<std::size_t>(ToInt(to) + 1);
  }
  std::int64_t scale_ = 1;
  std::int64_t budget_ = 0;
  std::vector<std::int64_t> table_;
};

using State = std::uint64_t;

FeatureValue Get(State s, std::size_t j) {
  return ToFeatureValue(static_cast<int>((s >> (2 * j)) & 3u) - 1);
}

State Set(State s, std::size_t j, FeatureValue v) {
  const State mask = State{3} << (2 * j);
  return (s & ~mask) | (static_cast<State>(ToInt(v) + 1) << (2 * j));
}

State Pack(std::span<const FeatureValue> x) {
  State s = 0;
  for (std::size_t j = 0; j < x.size(); ++j) s = Set(s, j, x[j]);
  return s;
}

void Unpack(State s, std::span<FeatureValue> out) {
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = Get(s, j);
}

struct Node {
  State state = 0;
  std::int64_t cost = 0;
  std::int32_t parent = -1;
  std::uint8_t feature = 0;
  FeatureValue to = FeatureValue::kPhishing;
  std::uint8_t length = 0;
};

class Search {
 public:
  Search(const EditOrder& order) : order_(order) {}

  // True if node a has strictly higher priority than node b.
  bool Before(std::int32_t a, std::int32_t b) const {
    const Node& na = nodes_[a];
    const Node& nb = nodes_[b];
    if (na.cost != nb.cost) return na.cost < nb.cost;
    if (na.length != nb.length) return na.length < nb.length;
    if (a == b) return false;
    // Equal lengths: climb in lockstep to just below the common ancestor,
    // where the first differing edit sits.
    std::int32_t ia = a, ib = b;
    while (nodes_[ia].parent != nodes_[ib].parent) {
      ia = nodes_[ia].parent;
      ib = nodes_[ib].parent;
    }
    return order_.rank(nodes_[ia].feature, nodes_[ia].to) <
           order_.rank(nodes_[ib].feature, nodes_[ib].to);
  }

  std::vector<Node> nodes_;
  const EditOrder& order_;
};

void CheckSearchInputs(const FeatureSchema& schema,
                       std::span<const FeatureValue> x, const Cost& b_max) {
  if (b_max.is_infinite()) {
    throw Error(ErrorCode::kConfigError, "b_max must be finite");
  }
  CheckAdmissible(schema, x);
}

EvasionResult Accepted() {
  EvasionResult r;
  r.mec = Cost(0);
  r.trace = EvasionTrace{{}, Cost(0)};
  return r;
}

}  // namespace

EditOrder EditOrder::Lexicographic(std::size_t dim) {
  EditOrder o;
  o.ranks_.resize(dim * 2);
  std::iota(o.ranks_.begin(), o.ranks_.end(), std::uint16_t{0});
  return o;
}

EditOrder EditOrder::Shuffled(std::size_t dim, std::uint64_t seed) {
  EditOrder o = Lexicographic(dim);
  Rng rng(seed);
  rng.Shuffle(std::span<std::uint16_t>(o.ranks_));
  return o;
}

AttackerConfig AttackerConfig::Exact(Cost b_max) {
  AttackerConfig c;
  c.mode = ExactAttack{};
  c.b_max = b_max;
  return c;
}

AttackerConfig AttackerConfig::Greedy(std::int64_t query_budget, Cost b_max) {
  AttackerConfig c;
  c.mode = GreedyAttack{query_budget};
  c.b_max = b_max;
  return c;
}

std::string AttackerConfig::Name() const {
  if (is_exact()) return "exact";
  return "greedy-Q" + std::to_string(std::get<GreedyAttack>(mode).query_budget);
}

EvasionResult MecExact(const Classifier& model, const CostSchedule& schedule,
                       const FeatureSchema& schema,
                       std::span<const FeatureValue> x, const Cost& b_max,
                       const EditOrder* order) {
  CheckSearchInputs(schema, x, b_max);
  const std::size_t d = schema.size();
  if (d > kMaxSearchDim) {
    throw Error(ErrorCode::kConfigError,
                "exact search supports at most 32 features", d);
  }
  EditOrder lexicographic;
  if (order == nullptr) {
    lexicographic = EditOrder::Lexicographic(d);
    order = &lexicographic;
  } else if (order->dim() != d) {
    throw Error(ErrorCode::kSchemaMismatch, "edit order width differs");
  }
  if (model.Predict(x) == Label::kLegitimate) return Accepted();

  const ScaledCosts costs(schedule, schema, b_max);
  Search search(*order);
  std::vector<Node>& nodes = search.nodes_;
  auto later = [&](std::int32_t a, std::int32_t b) {
    return search.Before(b, a);
  };
  std::priority_queue<std::int32_t, std::vector<std::int32_t>, decltype(later)>
      frontier(later);
  struct Slot {
    std::int32_t node;
    bool closed;
  };
  std::unordered_map<State, Slot> seen;

  nodes.push_back(Node{Pack(x), 0, -1, 0, FeatureValue::kPhishing, 0});
  seen.emplace(nodes[0].state, Slot{0, false});
  frontier.push(0);

  std::vector<FeatureValue> buffer(d);
  EvasionResult result;
  while (!frontier.empty()) {
    const std::int32_t idx = frontier.top();
    frontier.pop();
    Slot& slot = seen.at(nodes[idx].state);
    if (slot.closed || slot.node != idx) continue;
    slot.closed = true;
    ++result.expanded_nodes;

    const State state = nodes[idx].state;
    if (idx != 0) {
      Unpack(state, buffer);
      if (model.Predict(buffer) == Label::kLegitimate) {
        EvasionTrace trace;
        for (std::int32_t k = idx; nodes[k].parent >= 0; k = nodes[k].parent) {
          const Node& n = nodes[k];
          const FeatureValue from = Get(nodes[n.parent].state, n.feature);
          const Cost c = Cost(costs.Unscale(costs.at(n.feature, from, n.to)));
          trace.edits.push_back(Edit{n.feature, from, n.to, c});
        }
        std::reverse(trace.edits.begin(), trace.edits.end());
        trace.total = Cost(costs.Unscale(nodes[idx].cost));
        result.mec = trace.total;
        result.trace = std::move(trace);
        return result;
      }
    }

    for (std::size_t j = 0; j < d; ++j) {
      const FeatureValue from = Get(state, j);
      for (int t = ToInt(from) + 1; t <= 1; ++t) {
        const FeatureValue to = ToFeatureValue(t);
        const std::int64_t c = costs.at(j, from, to);
        if (c < 0) continue;
        const std::int64_t total = nodes[idx].cost + c;
        if (total > costs.budget()) continue;
        const State next = Set(state, j, to);
        auto it = seen.find(next);
        if (it != seen.end() && it->second.closed) continue;
        const auto candidate = static_cast<std::int32_t>(nodes.size());
        nodes.push_back(Node{next, total, idx, static_cast<std::uint8_t>(j),
                             to,
                             static_cast<std::uint8_t>(nodes[idx].length + 1)});
        if (it != seen.end()) {
          if (!search.Before(candidate, it->second.node)) {
            nodes.pop_back();
            continue;
          }
          it->second.node = candidate;
        } else {
          seen.emplace(next, Slot{candidate, false});
        }
        frontier.push(candidate);
      }
    }
  }
  return result;
}

EvasionResult MecGreedy(const Classifier& model, const CostSchedule& schedule,
                        const FeatureSchema& schema,
                        std::span<const FeatureValue> x, const Cost& b_max,
                        std::int64_t query_budget) {
  CheckSearchInputs(schema, x, b_max);
  EvasionResult result;
  std::int64_t queries = query_budget;
  if (queries <= 0) return result;
  std::vector<FeatureValue> current(x.begin(), x.end());
  double p_current = model.PredictProba(current);
  --queries;
  if (p_current >= 0.5) return Accepted();

  EvasionTrace trace;
  trace.total = Cost(0);
  while (true) {
    struct Option {
      Transition edit;
      Cost cost;
      double p;
    };
    std::optional<Option> flip, step;
    double best_ratio = 0.0;
    bool scanned_any = false;
    for (const Transition& e : AdmissibleEdits(schema, current)) {
      const Cost c = TransitionCost(schedule, schema, e.feature, e.from, e.to);
      if (c.is_infinite() || trace.total + c > b_max) continue;
      if (queries == 0) {
        if (!flip) return result;  // queries exhausted mid-scan
        break;
      }
      scanned_any = true;
      current[e.feature] = e.to;
      const double p = model.PredictProba(current);
      current[e.feature] = e.from;
      --queries;
      ++result.expanded_nodes;
      if (p >= 0.5) {
        if (!flip || c < flip->cost) flip = Option{e, c, p};
        continue;
      }
      const double ratio = (p - p_current) / std::max(c.ToDouble(), 1e-300);
      if (!step || ratio > best_ratio) {
        step = Option{e, c, p};
        best_ratio = ratio;
      }
    }
    if (!scanned_any && !flip) return result;  // nothing affordable
    const Option& chosen = flip ? *flip : *step;
    if (!flip && queries == 0) return result;
    current[chosen.edit.feature] = chosen.edit.to;
    trace.edits.push_back(
        Edit{chosen.edit.feature, chosen.edit.from, chosen.edit.to, chosen.cost});
    trace.total = trace.total + chosen.cost;
    p_current = chosen.p;
    if (flip) {
      result.mec = trace.total;
      result.trace = std::move(trace);
      return result;
    }
  }
}

EvasionResult Evade(const Classifier& model, const CostSchedule& schedule,
                    const FeatureSchema& schema,
                    std::span<const FeatureValue> x,
                    const AttackerConfig& attacker, const EditOrder* order) {
  if (attacker.is_exact()) {
    return MecExact(model, schedule, schema, x, attacker.b_max, order);
  }
  return MecGreedy(model, schedule, schema, x, attacker.b_max,
                   std::get<GreedyAttack>(attacker.mode).query_budget);
}

void ParallelFor(std::size_t n, unsigned workers,
                 const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr failure;
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<EvasionResult> BatchEvaluate(
    const Classifier& model, const CostSchedule& schedule,
    const FeatureSchema& schema,
    std::span<const std::vector<FeatureValue>> instances,
    const AttackerConfig& attacker, unsigned workers, const EditOrder* order) {
  std::vector<EvasionResult> out(instances.size());
  ParallelFor(instances.size(), workers, [&](std::size_t i) {
    out[i] = Evade(model, schedule, schema, instances[i], attacker, order);
  });
  return out;
}

std::vector<FeatureValue> ApplyTrace(std::span<const FeatureValue> x,
                                     const EvasionTrace& trace) {
  std::vector<FeatureValue> out(x.begin(), x.end());
  for (const Edit& e : trace.edits) {
    if (e.feature >= out.size()) {
      throw Error(ErrorCode::kLengthMismatch, "edit outside vector", e.feature);
    }
    out[e.feature] = e.to;
  }
  return out;
}

namespace {

nlohmann::ordered_json CostJson(const Cost& c) {
  if (c.is_infinite()) return "inf";
  if (c.value().is_integer()) return c.value().num();
  return c.value().ToString();
}

}  // namespace

std::string TraceJsonLine(std::size_t instance_id, const EvasionResult& result,
                          const FeatureSchema& schema) {
  nlohmann::ordered_json j;
  j["instance_id"] = instance_id;
  j["mec"] = CostJson(result.mec);
  if (result.trace) {
    nlohmann::ordered_json edits = nlohmann::ordered_json::array();
    for (const Edit& e : result.trace->edits) {
      edits.push_back({{"j", e.feature},
                       {"feature_name", schema.feature(e.feature).name},
                       {"from", ToInt(e.from)},
                       {"to", ToInt(e.to)},
                       {"cost", CostJson(e.cost)}});
    }
    j["trace"] = std::move(edits);
  } else {
    j["trace"] = nullptr;
  }
  j["expanded_nodes"] = result.expanded_nodes;
  return j.dump();
}

}  // namespace phishcost
