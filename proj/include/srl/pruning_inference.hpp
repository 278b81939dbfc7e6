#pragma once

#include <string>
#include <vector>

#include "srl/data_model.hpp"
#include "srl/linalg.hpp"

namespace srl {

// Candidates kept after ranking by unary score.
struct Beam {
  std::vector<int> ids;        // candidate positions, best first
  std::vector<double> scores;  // non-increasing
  int capacity = 0;
};

// ceil(beta * n), never below 1.
int beam_capacity(double beta, int n);

// Keeps the top ceil(beta * n) candidates by score. Equal scores are ordered
// by smaller start, then smaller end of `keys`.
Beam prune(const std::vector<double>& scores, const std::vector<SpanRef>& keys, int n,
           double beta);

// Role scores for every surviving (predicate, argument) pair. Row
// i * |arguments| + j belongs to (predicates[i], arguments[j]); column 0 is
// the null label and always zero.
struct ScoreTable {
  int sentence_length = 0;
  std::vector<int> predicates;
  std::vector<SpanRef> arguments;
  Matrix scores;
  RoleInventory roles;

  int row(int pred_pos, int arg_pos) const {
    return pred_pos * static_cast<int>(arguments.size()) + arg_pos;
  }
  // Total of the chosen role scores of `graph` (tuples must be in the table).
  double total(const SrlGraph& graph) const;
};

using ConstraintSet = ConstraintFlags;

// U+O for spans, U for dependencies.
ConstraintSet default_constraints(Style style);

// Independent per-pair argmax; the null label wins ties.
SrlGraph decode_greedy(const ScoreTable& table);

// Per predicate, the highest-total labeling subject to unique core roles (U)
// and non-overlapping arguments (O), found by dynamic programming over
// arguments with a core-role bitmask. Continuation (C) and reference (R)
// licensing are applied afterwards as filters.
SrlGraph decode_constrained(const ScoreTable& table, const ConstraintSet& constraints);

// Drops C-X without an earlier X and R-X without any X, per predicate.
std::vector<Tuple> filter_licensing(std::vector<Tuple> tuples, bool continuation,
                                    bool reference);

}  // namespace srl
