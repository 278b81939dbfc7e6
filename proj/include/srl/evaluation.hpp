#pragma once

#include <string>
#include <vector>

#include "srl/data_model.hpp"

namespace srl {

// Percentages are rounded half-up to two decimals from the exact counts.
struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long matched = 0;
  long predicted = 0;
  long gold = 0;
  PredicateMode mode = PredicateMode::EndToEnd;
  Style style = Style::Span;

  std::string to_json() const;
  std::string to_table() const;
};

// Percent value of num / den rounded half-up to hundredths; 0 when den == 0.
double percent_2dp(long num, long den);

EvalReport make_report(long matched, long predicted, long gold, PredicateMode mode, Style style);

// Exact (p, i, j, role) matching, summed over aligned sentences.
EvalReport evaluate(const std::vector<SrlGraph>& predicted, const std::vector<SrlGraph>& gold,
                    PredicateMode mode, Style style);

// Maps every span argument to its syntactic heads: the tokens of the span
// whose own head lies outside it. Each head token yields one tuple carrying
// the span's role. Identical tuples collapse; when two spans of a predicate
// reach the same head token the earlier span keeps it.
SrlGraph span_to_dep(const SrlGraph& graph, const std::vector<int>& heads);

// Throws MissingSyntax / CyclicHeads / MultipleRoots.
void check_heads(const std::vector<int>& heads);

struct StyleComparison {
  EvalReport dependency;      // dependency predictions vs gold
  EvalReport span_converted;  // span predictions after span_to_dep vs gold
  double delta_f1 = 0.0;      // dependency.f1 - span_converted.f1
};

// Both prediction sets are scored against the same dependency gold, with
// tuples of predicates flagged nominal in `gold` removed everywhere. Heads
// come from the gold sentences.
StyleComparison compare_styles(const std::vector<SrlGraph>& span_predictions,
                               const std::vector<SrlGraph>& dep_predictions,
                               const std::vector<Sentence>& gold, PredicateMode mode);

}  // namespace srl
