#include "srl/pruning_inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace srl {

int beam_capacity(double beta, int n) {
  if (!(beta > 0.0 && beta <= 1.0)) throw SrlError("BadBeam", "beta must lie in (0, 1]");
  // The epsilon keeps products such as 0.4 * 10 from rounding up to 5.
  int cap = static_cast<int>(std::ceil(beta * n - 1e-9));
  return std::max(cap, 1);
}

Beam prune(const std::vector<double>& scores, const std::vector<SpanRef>& keys, int n,
           double beta) {
  if (scores.size() != keys.size())
    throw SrlError("ShapeMismatch", "prune: scores and keys differ in length");
  Beam beam;
  beam.capacity = beam_capacity(beta, n);
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return keys[a] < keys[b];
  });
  const std::size_t keep = std::min<std::size_t>(order.size(), beam.capacity);
  for (std::size_t k = 0; k < keep; ++k) {
    beam.ids.push_back(order[k]);
    beam.scores.push_back(scores[order[k]]);
  }
  return beam;
}

double ScoreTable::total(const SrlGraph& graph) const {
  double sum = 0.0;
  for (const auto& t : graph.tuples()) {
    auto pi = std::find(predicates.begin(), predicates.end(), t.predicate);
    auto ai = std::find(arguments.begin(), arguments.end(), t.argument);
    if (pi == predicates.end() || ai == arguments.end())
      throw SrlError("UnknownCandidate", "tuple not present in score table");
    sum += scores(row(static_cast<int>(pi - predicates.begin()),
                      static_cast<int>(ai - arguments.begin())),
                  roles.index(t.role));
  }
  return sum;
}

ConstraintSet default_constraints(Style style) {
  ConstraintSet c;
  c.unique_core = true;
  c.non_overlap = style == Style::Span;
  return c;
}

SrlGraph decode_greedy(const ScoreTable& table) {
  std::vector<Tuple> out;
  const int roles = static_cast<int>(table.scores.cols());
  for (std::size_t i = 0; i < table.predicates.size(); ++i) {
    for (std::size_t j = 0; j < table.arguments.size(); ++j) {
      const int r = table.row(static_cast<int>(i), static_cast<int>(j));
      int best = 0;
      for (int c = 1; c < roles; ++c)
        if (table.scores(r, c) > table.scores(r, best)) best = c;
      if (best != 0)
        out.push_back({table.predicates[i], table.arguments[j], table.roles.label(best)});
    }
  }
  return SrlGraph(std::move(out));
}

namespace {

constexpr int kMaxCoreRoles = 12;

struct Choice {
  int arg = -1;   // -1: skip
  int role = 0;
};

// Best labeling of the arguments of one predicate. With `non_overlap` the DP
// runs over sentence positions (weighted interval scheduling), otherwise over
// the argument list. `core_bit[r]` is the mask bit of role r or -1.
std::vector<std::pair<int, int>> best_labeling(const ScoreTable& table, int pred_pos,
                                               const std::vector<int>& core_bit, int core_count,
                                               bool non_overlap) {
  const int roles = static_cast<int>(table.scores.cols());
  const int masks = 1 << core_count;
  const int full = masks - 1;
  const auto& args = table.arguments;

  // Items grouped by DP step. Step s consumes the items in groups[s - 1].
  int steps = 0;
  std::vector<std::vector<int>> groups;
  if (non_overlap) {
    int n = table.sentence_length;
    for (const auto& a : args) n = std::max(n, a.end);
    steps = n;
    groups.assign(n, {});
    for (std::size_t j = 0; j < args.size(); ++j) groups[args[j].end - 1].push_back(static_cast<int>(j));
    for (auto& g : groups)
      std::sort(g.begin(), g.end(), [&](int a, int b) { return args[a] < args[b]; });
  } else {
    steps = static_cast<int>(args.size());
    for (int j = 0; j < steps; ++j) groups.push_back({j});
  }

  const double kNeg = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best(steps + 1, std::vector<double>(masks, kNeg));
  std::vector<std::vector<Choice>> choice(steps + 1, std::vector<Choice>(masks));
  std::fill(best[0].begin(), best[0].end(), 0.0);

  for (int s = 1; s <= steps; ++s) {
    for (int mask = 0; mask < masks; ++mask) {
      double value = best[s - 1][mask];
      Choice pick;
      for (int j : groups[s - 1]) {
        const int prev = non_overlap ? args[j].start - 1 : s - 1;
        const int row = table.row(pred_pos, j);
        for (int r = 1; r < roles; ++r) {
          int prev_mask = mask;
          if (core_bit[r] >= 0) {
            if (!(mask & (1 << core_bit[r]))) continue;
            prev_mask = mask & ~(1 << core_bit[r]);
          }
          double cand = best[prev][prev_mask] + table.scores(row, r);
          if (cand > value) {
            value = cand;
            pick = {j, r};
          }
        }
      }
      best[s][mask] = value;
      choice[s][mask] = pick;
    }
  }

  std::vector<std::pair<int, int>> chosen;
  int s = steps, mask = full;
  while (s > 0) {
    const Choice& c = choice[s][mask];
    if (c.arg < 0) {
      --s;
      continue;
    }
    chosen.emplace_back(c.arg, c.role);
    if (core_bit[c.role] >= 0) mask &= ~(1 << core_bit[c.role]);
    s = non_overlap ? args[c.arg].start - 1 : s - 1;
  }
  return chosen;
}

}  // namespace

SrlGraph decode_constrained(const ScoreTable& table, const ConstraintSet& constraints) {
  if (!constraints.unique_core && !constraints.non_overlap) {
    SrlGraph g = decode_greedy(table);
    return SrlGraph(filter_licensing(g.tuples(), constraints.continuation, constraints.reference),
                    constraints);
  }
  const int roles = static_cast<int>(table.scores.cols());
  std::vector<int> core_bit(roles, -1);
  int core_count = 0;
  if (constraints.unique_core) {
    for (int r = 1; r < roles; ++r)
      if (table.roles.is_core(r)) core_bit[r] = core_count++;
    if (core_count > kMaxCoreRoles)
      throw SrlError("CoreMaskOverflow", std::to_string(core_count) + " core roles exceed " +
                                             std::to_string(kMaxCoreRoles));
  }
  std::vector<Tuple> out;
  for (std::size_t i = 0; i < table.predicates.size(); ++i) {
    for (auto [j, r] : best_labeling(table, static_cast<int>(i), core_bit, core_count,
                                     constraints.non_overlap))
      out.push_back({table.predicates[i], table.arguments[j], table.roles.label(r)});
  }
  return SrlGraph(filter_licensing(std::move(out), constraints.continuation, constraints.reference),
                  constraints);
}

std::vector<Tuple> filter_licensing(std::vector<Tuple> tuples, bool continuation,
                                    bool reference) {
  if (!continuation && !reference) return tuples;
  // Earliest start of each realized base role, per predicate.
  std::map<std::pair<int, std::string>, int> first_start;
  for (const auto& t : tuples) {
    if (continuation_base(t.role) || reference_base(t.role)) continue;
    auto key = std::make_pair(t.predicate, t.role);
    auto it = first_start.find(key);
    if (it == first_start.end() || t.argument.start < it->second) first_start[key] = t.argument.start;
  }
  std::vector<Tuple> kept;
  for (auto& t : tuples) {
    if (continuation) {
      if (auto base = continuation_base(t.role)) {
        auto it = first_start.find({t.predicate, *base});
        if (it == first_start.end() || it->second >= t.argument.start) continue;
      }
    }
    if (reference) {
      if (auto base = reference_base(t.role)) {
        if (!first_start.count({t.predicate, *base})) continue;
      }
    }
    kept.push_back(std::move(t));
  }
  return kept;
}

}  // namespace srl
