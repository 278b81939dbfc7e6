#include "srl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "json.hpp"

namespace srl {

double percent_2dp(long num, long den) {
  if (den <= 0) return 0.0;
  // hundredths of a percent: floor(10000 * num / den + 1/2)
  long long hundredths = (20000LL * num + den) / (2LL * den);
  return static_cast<double>(hundredths) / 100.0;
}

EvalReport make_report(long matched, long predicted, long gold, PredicateMode mode, Style style) {
  EvalReport r;
  r.matched = matched;
  r.predicted = predicted;
  r.gold = gold;
  r.mode = mode;
  r.style = style;
  r.precision = percent_2dp(matched, predicted);
  r.recall = percent_2dp(matched, gold);
  r.f1 = percent_2dp(2 * matched, predicted + gold);
  return r;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["matched"] = matched;
  j["predicted"] = predicted;
  j["gold"] = gold;
  j["mode"] = srl::to_string(mode);
  j["style"] = srl::to_string(style);
  return j.dump();
}

std::string EvalReport::to_table() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "style %-4s  mode %-14s\n"
                "  P %6.2f  R %6.2f  F1 %6.2f\n"
                "  matched %ld  predicted %ld  gold %ld\n",
                srl::to_string(style).c_str(), srl::to_string(mode).c_str(), precision, recall, f1,
                matched, predicted, gold);
  return buf;
}

EvalReport evaluate(const std::vector<SrlGraph>& predicted, const std::vector<SrlGraph>& gold,
                    PredicateMode mode, Style style) {
  if (predicted.size() != gold.size())
    throw SrlError("LengthMismatch", std::to_string(predicted.size()) + " predicted vs " +
                                         std::to_string(gold.size()) + " gold sentences");
  long matched = 0, n_pred = 0, n_gold = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const auto& p = predicted[s].tuples();
    const auto& g = gold[s].tuples();
    n_pred += static_cast<long>(p.size());
    n_gold += static_cast<long>(g.size());
    // Both sides are sorted.
    std::vector<Tuple> common;
    std::set_intersection(p.begin(), p.end(), g.begin(), g.end(), std::back_inserter(common));
    matched += static_cast<long>(common.size());
  }
  return make_report(matched, n_pred, n_gold, mode, style);
}

void check_heads(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  if (n == 0) throw SrlError("MissingSyntax", "no syntactic heads");
  int roots = 0;
  for (int h : heads) {
    if (h < 0 || h > n) throw SrlError("MissingSyntax", "head index out of range");
    if (h == 0) ++roots;
  }
  if (roots != 1)
    throw SrlError("MultipleRoots", "expected exactly one root, found " + std::to_string(roots));
  // 0 unvisited, 1 on current path, 2 reaches root
  std::vector<int> state(n + 1, 0);
  state[0] = 2;
  for (int start = 1; start <= n; ++start) {
    std::vector<int> path;
    int t = start;
    while (state[t] == 0) {
      state[t] = 1;
      path.push_back(t);
      t = heads[t - 1];
    }
    if (state[t] == 1) throw SrlError("CyclicHeads", "cycle through token " + std::to_string(t));
    for (int v : path) state[v] = 2;
  }
}

SrlGraph span_to_dep(const SrlGraph& graph, const std::vector<int>& heads) {
  check_heads(heads);
  const int n = static_cast<int>(heads.size());
  std::vector<Tuple> out;
  std::set<std::pair<int, int>> taken;
  for (const auto& t : graph.tuples()) {
    const SpanRef a = t.argument;
    if (a.end > n) throw SrlError("BadIndex", "argument outside the head array");
    for (int tok = a.start; tok <= a.end; ++tok) {
      const int h = heads[tok - 1];
      if (a.contains(h)) continue;
      if (!taken.insert({t.predicate, tok}).second) continue;
      out.push_back({t.predicate, {tok, tok}, t.role});
    }
  }
  return SrlGraph(std::move(out), graph.constraints());
}

namespace {

SrlGraph drop_nominal(const SrlGraph& graph, const std::vector<int>& nominal) {
  if (nominal.empty()) return graph;
  std::vector<Tuple> kept;
  for (const auto& t : graph.tuples())
    if (!std::binary_search(nominal.begin(), nominal.end(), t.predicate)) kept.push_back(t);
  return SrlGraph(std::move(kept), graph.constraints());
}

}  // namespace

StyleComparison compare_styles(const std::vector<SrlGraph>& span_predictions,
                               const std::vector<SrlGraph>& dep_predictions,
                               const std::vector<Sentence>& gold, PredicateMode mode) {
  if (span_predictions.size() != gold.size() || dep_predictions.size() != gold.size())
    throw SrlError("LengthMismatch", "prediction and gold sentence counts differ");
  std::vector<SrlGraph> gold_graphs, dep, converted;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const Sentence& g = gold[s];
    if (!g.gold_heads)
      throw SrlError("MissingSyntax", "gold sentence " + std::to_string(s) + " has no heads");
    gold_graphs.push_back(drop_nominal(gold_graph(g), g.nominal_predicates));
    dep.push_back(drop_nominal(dep_predictions[s], g.nominal_predicates));
    converted.push_back(
        drop_nominal(span_to_dep(span_predictions[s], *g.gold_heads), g.nominal_predicates));
  }
  StyleComparison out;
  out.dependency = evaluate(dep, gold_graphs, mode, Style::Dep);
  out.span_converted = evaluate(converted, gold_graphs, mode, Style::Dep);
  out.delta_f1 = std::round((out.dependency.f1 - out.span_converted.f1) * 100.0) / 100.0;
  return out;
}

}  // namespace srl
