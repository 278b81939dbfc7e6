// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "decoder_oracle.hpp"
#include "json.hpp"
#include "projective.hpp"
#include "srl/corpus_io.hpp"
#include "srl/evaluation.hpp"
#include "srl/trainer.hpp"
#include "test_util.hpp"

using namespace srl;
using namespace srl::ad;
using srl::testutil::random_matrix;
using Clock = std::chrono::steady_clock;

namespace {

// tolerances
constexpr double kFdStep = 1e-5;
constexpr double kFdRelTol = 1e-4;
// below this magnitude gradients are compared absolutely (tol * floor = 1e-9)
constexpr double kModelGradFloor = 1e-5;
constexpr double kGradSeconds = 120.0;
constexpr double kDecoderSeconds = 60.0;
constexpr double kOverfitSeconds = 600.0;
constexpr double kOverfitF1 = 99.0;
constexpr int kOverfitEpochs = 300;
constexpr double kSumTol = 1e-12;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

// worst relative error of d/d inputs of sum(f(inputs) * W) for random W
double primitive_error(std::vector<Matrix> inputs,
                       const std::function<Var(Tape&, std::vector<Var>&)>& f,
                       std::mt19937_64& rng, std::string& where) {
  ParameterSet params;
  for (std::size_t k = 0; k < inputs.size(); ++k) params.add("in" + std::to_string(k), inputs[k]);
  Matrix weights;
  auto loss = [&](bool backward) {
    Tape tape(backward);
    std::vector<Var> vars;
    for (std::size_t k = 0; k < params.size(); ++k) vars.push_back(tape.parameter(params[k]));
    Var out = f(tape, vars);
    if (weights.size() == 0) weights = random_matrix(out.rows(), out.cols(), rng);
    Var l = sum(mul(out, tape.constant(weights)));
    if (backward) tape.backward(l);
    return l.value()(0, 0);
  };
  auto res = testutil::check_gradients(params, loss, kFdStep);
  where = res.where;
  return res.worst;
}

int dim(std::mt19937_64& rng, int hi = 6) { return 1 + static_cast<int>(rng() % hi); }

std::vector<Sentence> grad_corpus(Style style) {
  std::vector<Tuple> span = {{2, {1, 1}, "A0"}, {2, {3, 4}, "A1"}};
  std::vector<Tuple> dep = {{2, {1, 1}, "A0"}, {2, {4, 4}, "A1"}};
  return {make_sentence({"John", "ate", "an", "apple"}, style == Style::Span ? span : dep, style,
                        std::vector<int>{2, 0, 4, 2}),
          make_sentence({"Mary", "slept"}, {{2, {1, 1}, "A0"}}, style)};
}

Verdict gradients() {
  Verdict v;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  auto check = [&](const std::string& name, std::vector<Matrix> in,
                   const std::function<Var(Tape&, std::vector<Var>&)>& f) {
    std::string where;
    const double e = primitive_error(std::move(in), f, rng, where);
    worst = std::max(worst, e);
    if (!(e < kFdRelTol)) v.fail(name + " " + where + " rel " + std::to_string(e));
  };
  for (int trial = 0; trial < 5; ++trial) {
    const int r = dim(rng), c = dim(rng), k = dim(rng);
    check("matmul", {random_matrix(r, k, rng), random_matrix(k, c, rng)},
          [](Tape&, auto& x) { return matmul(x[0], x[1]); });
    check("transpose", {random_matrix(r, c, rng)}, [](Tape&, auto& x) { return transpose(x[0]); });
    check("add", {random_matrix(r, c, rng), random_matrix(r, c, rng)},
          [](Tape&, auto& x) { return add(x[0], x[1]); });
    check("sub", {random_matrix(r, c, rng), random_matrix(r, c, rng)},
          [](Tape&, auto& x) { return sub(x[0], x[1]); });
    check("mul", {random_matrix(r, c, rng), random_matrix(r, c, rng)},
          [](Tape&, auto& x) { return mul(x[0], x[1]); });
    check("scale", {random_matrix(r, c, rng)}, [](Tape&, auto& x) { return scale(x[0], 2.3); });
    check("add_scalar", {random_matrix(r, c, rng)},
          [](Tape&, auto& x) { return add_scalar(x[0], -0.4); });
    check("add_bias", {random_matrix(r, c, rng), random_matrix(1, c, rng)},
          [](Tape&, auto& x) { return add_bias(x[0], x[1]); });
    check("concat", {random_matrix(r, c, rng), random_matrix(r, k, rng)},
          [](Tape&, auto& x) { return concat({x[0], x[1]}, 1); });
    check("concat_rows", {random_matrix(r, c, rng), random_matrix(k, c, rng)},
          [](Tape&, auto& x) { return concat({x[0], x[1]}, 0); });
    check("slice_rows", {random_matrix(r + 1, c, rng)},
          [r](Tape&, auto& x) { return slice_rows(x[0], 1, r); });
    check("slice_cols", {random_matrix(r, c + 1, rng)},
          [c](Tape&, auto& x) { return slice_cols(x[0], 1, c); });
    check("sigmoid", {random_matrix(r, c, rng, -3, 3)}, [](Tape&, auto& x) { return sigmoid(x[0]); });
    check("tanh", {random_matrix(r, c, rng, -3, 3)}, [](Tape&, auto& x) { return ad::tanh(x[0]); });
    Matrix rel = random_matrix(r, c, rng, 0.1, 1.0);
    for (Eigen::Index q = 0; q < rel.size(); ++q)
      if (rng() % 2) rel.data()[q] = -rel.data()[q];
    check("relu", {rel}, [](Tape&, auto& x) { return relu(x[0]); });
    check("softmax", {random_matrix(r, c, rng, -2, 2)},
          [](Tape&, auto& x) { return softmax(x[0], 1); });
    check("softmax_cols", {random_matrix(r, c, rng, -2, 2)},
          [](Tape&, auto& x) { return softmax(x[0], 0); });
    check("sum", {random_matrix(r, c, rng)}, [](Tape&, auto& x) { return sum(x[0]); });
    Matrix mask = random_matrix(r, c, rng, 0, 2);
    check("dropout", {random_matrix(r, c, rng)},
          [mask](Tape&, auto& x) { return dropout(x[0], mask); });
    std::vector<int> ids;
    for (int q = 0; q < k + 1; ++q) ids.push_back(static_cast<int>(rng() % r));
    check("lookup", {random_matrix(r, c, rng)}, [ids](Tape&, auto& x) { return lookup(x[0], ids); });
    Matrix pool(r, c);
    std::vector<double> vals(r * c);
    for (int q = 0; q < r * c; ++q) vals[q] = 0.01 * q;
    std::shuffle(vals.begin(), vals.end(), rng);
    for (int q = 0; q < r * c; ++q) pool.data()[q] = vals[q];
    check("max_pool", {pool}, [](Tape&, auto& x) { return max_pool(x[0]); });
    const int w = 1 + static_cast<int>(rng() % r);
    check("unfold", {random_matrix(r, c, rng)}, [w](Tape&, auto& x) { return unfold(x[0], w); });
    const int m = dim(rng, 4), a = dim(rng, 4), dp = dim(rng, 4), da = dim(rng, 4), R = dim(rng, 4);
    check("biaffine",
          {random_matrix(m, dp, rng), random_matrix(a, da, rng), random_matrix(dp, R * da, rng),
           random_matrix(dp + da, R, rng), random_matrix(1, R, rng)},
          [](Tape&, auto& x) { return biaffine(x[0], x[1], x[2], x[3], x[4]); });
    check("tuple_scores",
          {random_matrix(m, 1, rng), random_matrix(a, 1, rng), random_matrix(m * a, R + 1, rng)},
          [](Tape&, auto& x) { return tuple_scores(x[0], x[1], x[2]); });
    std::vector<int> gold;
    for (int q = 0; q < r; ++q) gold.push_back(static_cast<int>(rng() % c));
    check("softmax_cross_entropy", {random_matrix(r, c, rng, -2, 2)},
          [gold](Tape&, auto& x) { return softmax_cross_entropy(x[0], gold); });
  }

  // full model loss, both styles, with and without dropout
  for (Style style : {Style::Span, Style::Dep}) {
    for (int variant = 0; variant < 2; ++variant) {
      ModelConfig cfg = testutil::tiny_config(style);
      auto corpus = grad_corpus(style);
      Model model(cfg, build_vocab(corpus), 31 + variant);
      const Sentence& gold = corpus[variant];
      SentenceInput in = index_sentence(gold, model.vocab(), 0);
      std::mt19937_64 mrng(5 + variant);
      DropoutMasks masks = variant ? sample_masks(cfg, gold.size(), mrng) : no_dropout();
      const PredicateMode mode = variant ? PredicateMode::PreIdentified : PredicateMode::EndToEnd;
      auto loss = [&](bool backward) {
        Tape tape(backward);
        auto fwd = score_sentence(tape, model, in, masks, mode, gold.predicates);
        auto l = sentence_loss(tape, fwd, gold);
        if (backward) tape.backward(l.loss);
        return l.loss.value()(0, 0);
      };
      auto res = testutil::check_gradients(model.params(), loss, kFdStep, kModelGradFloor);
      worst = std::max(worst, res.worst);
      if (!(res.worst < kFdRelTol))
        v.fail("model " + to_string(style) + " " + res.where + " rel " + std::to_string(res.worst));
    }
  }
  const double secs = seconds_since(t0);
  if (secs >= kGradSeconds) v.fail("took " + std::to_string(secs) + " s");
  if (v.pass) {
    std::ostringstream os;
    os << "worst rel " << worst << ", " << secs << " s";
    v.detail = os.str();
  }
  return v;
}

Verdict decoder() {
  Verdict v;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  ConstraintSet uo;
  uo.unique_core = true;
  uo.non_overlap = true;
  for (int trial = 0; trial < 1000; ++trial) {
    auto table = testutil::random_table(rng, 4, 2, 3);
    SrlGraph g = decode_constrained(table, uo);
    const double best = testutil::brute_force_best(table, uo);
    if (std::abs(table.total(g) - best) > 1e-9)
      v.fail("table " + std::to_string(trial) + ": " + std::to_string(table.total(g)) + " vs " +
             std::to_string(best));
    if (!testutil::satisfies(g, table, uo)) v.fail("table " + std::to_string(trial) + " violates U/O");
  }
  const double secs = seconds_since(t0);
  if (secs >= kDecoderSeconds) v.fail("took " + std::to_string(secs) + " s");
  if (v.pass) v.detail = "1000 tables, " + std::to_string(secs) + " s";
  return v;
}

Verdict pruning() {
  Verdict v;
  std::mt19937_64 rng(303);
  // the beam itself: capacity and ordering with ties broken by (start, end)
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 50);
    auto keys = enumerate_arguments(n, 1 + static_cast<int>(rng() % 8));
    std::vector<double> s(keys.size());
    for (auto& x : s) x = static_cast<double>(rng() % 4);
    const double beta = 0.05 + 0.95 * std::uniform_real_distribution<double>(0, 1)(rng);
    Beam b = prune(s, keys, n, beta);
    if (static_cast<int>(b.ids.size()) !=
        std::min<int>(beam_capacity(beta, n), static_cast<int>(keys.size())))
      v.fail("beam size at n=" + std::to_string(n));
    std::vector<bool> kept(keys.size(), false);
    for (int id : b.ids) kept[id] = true;
    for (std::size_t k = 1; k < b.ids.size(); ++k) {
      const int a = b.ids[k - 1], c = b.ids[k];
      if (!(s[a] > s[c] || (s[a] == s[c] && keys[a] < keys[c]))) v.fail("beam order");
    }
    if (b.ids.empty()) continue;
    const int last = b.ids.back();
    for (std::size_t d = 0; d < keys.size(); ++d)
      if (!kept[d] && !(s[d] < s[last] || (s[d] == s[last] && keys[last] < keys[d])))
        v.fail("dropped candidate outranks a kept one");
  }
  // through the network: surviving tuples per sentence
  std::vector<Sentence> seed_corpus = {make_sentence({"a", "b"}, {{1, {2, 2}, "A0"}}, Style::Span)};
  ModelConfig cfg = testutil::tiny_config(Style::Span);
  cfg.beam_pred = 0.4;
  cfg.beam_arg = 0.8;
  cfg.max_span_len = 8;
  Model model(cfg, build_vocab(seed_corpus), 3);
  long max_rows = 0;
  for (int trial = 0; trial < 30; ++trial) {
    auto s = testutil::random_sentence(rng, 50, Style::Span, false);
    Tape tape(false);
    auto fwd = score_sentence(tape, model, index_sentence(s, model.vocab(), 0), no_dropout(),
                              PredicateMode::EndToEnd);
    const int n = s.size();
    const long bound = static_cast<long>(beam_capacity(cfg.beam_pred, n)) *
                       beam_capacity(cfg.beam_arg, n) * model.roles().size();
    const long cells = fwd.table.scores.rows() * fwd.table.scores.cols();
    max_rows = std::max(max_rows, cells);
    if (cells > bound) v.fail("n=" + std::to_string(n) + ": " + std::to_string(cells) + " > " +
                              std::to_string(bound));
  }
  if (v.pass) v.detail = "500 beams, 30 sentences";
  return v;
}

Verdict overfit() {
  Verdict v;
  const auto t0 = Clock::now();
  auto base = ModelConfig::from_json(read_file(testutil::fixture("overfit64.json")));
  std::ostringstream detail;
  for (Style style : {Style::Span, Style::Dep}) {
    auto corpus =
        load_corpus(testutil::fixture(style == Style::Span ? "toy_span.jsonl" : "toy_dep.jsonl"));
    TrainOptions o;
    o.config = base;
    if (style == Style::Dep) o.config.max_span_len = 1;
    o.seed = 7;
    o.epochs = kOverfitEpochs;
    o.stop_at_f1 = 100.0;
    TrainResult r = train(corpus, corpus, o);
    Model best = r.best_model();
    PredictOptions po;
    po.constraints = default_constraints(style);
    auto pred = predict(best, corpus, po);
    std::vector<SrlGraph> gold;
    for (const auto& s : corpus) gold.push_back(gold_graph(s));
    auto rep = evaluate(pred, gold, PredicateMode::EndToEnd, style);
    detail << to_string(style) << " F1 " << rep.f1 << " @ epoch " << r.best_epoch << "; ";
    if (!(rep.f1 >= kOverfitF1)) v.fail(to_string(style) + " F1 " + std::to_string(rep.f1));
  }
  const double secs = seconds_since(t0);
  detail << secs << " s";
  if (secs >= kOverfitSeconds) v.fail("took " + std::to_string(secs) + " s");
  if (v.pass) v.detail = detail.str();
  return v;
}

Verdict metrics() {
  Verdict v;
  auto expected = nlohmann::json::parse(read_file(testutil::fixture("metrics/expected.json")));
  int cases = 0;
  for (const auto& e : expected) {
    const std::string c = e["case"], mode = e["mode"];
    auto gold = load_corpus(testutil::fixture("metrics/" + c + ".gold.jsonl"));
    auto pred = load_corpus(testutil::fixture(
        "metrics/" + c + (mode == "end-to-end" ? ".pred_e2e.jsonl" : ".pred_pi.jsonl")));
    std::vector<SrlGraph> pg, gg;
    for (const auto& s : pred) pg.push_back(gold_graph(s));
    for (const auto& s : gold) gg.push_back(gold_graph(s));
    auto r = evaluate(pg, gg, parse_predicate_mode(mode), parse_style(e["style"]));
    if (r.precision != e["precision"].get<double>() || r.recall != e["recall"].get<double>() ||
        r.f1 != e["f1"].get<double>())
      v.fail(c + " " + mode + ": got " + r.to_json());
    ++cases;
  }
  if (cases != 10) v.fail("expected 10 fixture rows, found " + std::to_string(cases));
  if (v.pass) v.detail = "5 cases x 2 modes";
  return v;
}

Verdict null_role() {
  Verdict v;
  std::mt19937_64 rng(606);
  long rows = 0;
  double worst = 0.0;
  for (Style style : {Style::Span, Style::Dep}) {
    for (int trial = 0; trial < 10; ++trial) {
      auto s = testutil::random_sentence(rng, 12, style, false);
      std::vector<Sentence> c = {s, make_sentence({"x", "y"}, {{1, {2, 2}, "A0"}, {2, {1, 1}, "A1"}},
                                                  style)};
      Model model(testutil::tiny_config(style), build_vocab(c), rng());
      // random parameters well beyond the initial scale
      for (std::size_t k = 0; k < model.params().size(); ++k) {
        Matrix& p = model.params()[k].value;
        p = random_matrix(p.rows(), p.cols(), rng, -2, 2);
      }
      Tape tape(false);
      auto fwd = score_sentence(tape, model, index_sentence(s, model.vocab(), 0), no_dropout(),
                                PredicateMode::EndToEnd);
      const Matrix& sc = fwd.table.scores;
      for (int r = 0; r < sc.rows(); ++r) {
        ++rows;
        if (sc(r, 0) != 0.0) v.fail("null score " + std::to_string(sc(r, 0)));
        Var p = softmax(tape.constant(sc.row(r)), 1);
        const double err = std::abs(p.value().sum() - 1.0);
        worst = std::max(worst, err);
        if (err > kSumTol) v.fail("distribution sums off by " + std::to_string(err));
      }
    }
  }
  if (v.pass) {
    std::ostringstream os;
    os << rows << " rows, worst |sum-1| " << worst;
    v.detail = os.str();
  }
  return v;
}

Verdict conversion() {
  Verdict v;
  std::mt19937_64 rng(707);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 20);
    auto heads = testutil::random_projective_heads(n, rng);
    for (int i = 1; i <= n; ++i)
      for (int j = i; j <= n; ++j) {
        auto out = span_to_dep(SrlGraph({{1, {i, j}, "A1"}}), heads);
        if (out.empty()) v.fail("empty head set");
        for (const auto& t : out.tuples())
          if (t.argument.start != t.argument.end || t.argument.start < i || t.argument.start > j)
            v.fail("head outside span");
      }
    std::vector<Tuple> w1;
    for (int t = 1; t <= n; ++t)
      if (rng() % 2) w1.push_back({1 + static_cast<int>(rng() % n), {t, t}, "A0"});
    SrlGraph g(w1);
    if (!(span_to_dep(g, heads) == g)) v.fail("width-1 conversion changed the graph");
  }
  auto dep = load_corpus(testutil::fixture("toy_dep.jsonl"));
  std::vector<SrlGraph> gs;
  for (const auto& s : dep) gs.push_back(gold_graph(s));
  auto cmp = compare_styles(gs, gs, dep, PredicateMode::EndToEnd);
  if (cmp.delta_f1 != 0.0) v.fail("delta " + std::to_string(cmp.delta_f1));
  if (v.pass) v.detail = "500 trees, delta 0.00";
  return v;
}

Verdict determinism() {
  Verdict v;
  auto corpus = load_corpus(testutil::fixture("toy_span.jsonl"));
  TrainOptions o;
  o.config = testutil::tiny_config(Style::Span);
  o.seed = 42;
  o.epochs = 3;
  auto a = train(corpus, corpus, o);
  auto b = train(corpus, corpus, o);
  if (a.log.empty() || b.log.empty()) {
    v.fail("no epochs ran");
    return v;
  }
  const double la = a.log[0].loss, lb = b.log[0].loss;
  if (std::memcmp(&la, &lb, sizeof la) != 0) v.fail("epoch-1 loss differs");
  if (a.best_checkpoint != b.best_checkpoint) v.fail("best checkpoints differ");
  if (v.pass) {
    std::ostringstream os;
    os.precision(17);
    os << "epoch-1 loss " << la << ", checkpoint " << a.best_checkpoint.size() << " bytes";
    v.detail = os.str();
  }
  return v;
}

Verdict round_trip() {
  Verdict v;
  std::mt19937_64 rng(909);
  std::vector<Sentence> mixed, dep;
  for (int k = 0; k < 1000; ++k) {
    auto s = testutil::random_sentence(rng, 15, k % 2 ? Style::Span : Style::Dep, k % 3 != 0);
    if (k % 7 == 0 && !s.predicates.empty()) s.nominal_predicates = {s.predicates.front()};
    mixed.push_back(s);
    dep.push_back(testutil::random_sentence(rng, 15, Style::Dep, k % 2 == 0));
  }
  const std::string j = emit_jsonl(mixed);
  if (!(parse_jsonl(j) == mixed)) v.fail("JSONL values differ");
  if (emit_jsonl(parse_jsonl(j)) != j) v.fail("JSONL re-emission differs");
  const std::string t = emit_conll(dep);
  if (!(parse_conll(t) == dep)) v.fail("TSV values differ");
  if (emit_conll(parse_conll(t)) != t) v.fail("TSV re-emission differs");
  if (v.pass) v.detail = "1000 JSONL + 1000 TSV sentences";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"gradient correctness", gradients},
      {"decoder optimality", decoder},
      {"pruning contract", pruning},
      {"overfit sanity", overfit},
      {"metric fixtures", metrics},
      {"null role enforcement", null_role},
      {"conversion properties", conversion},
      {"determinism", determinism},
      {"round-trip I/O", round_trip},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << (k + 1) << " " << criteria[k].first << ": "
              << v.detail << std::endl;
  }
  return failures;
}
