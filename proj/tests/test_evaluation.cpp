#include <gtest/gtest.h>

#include <random>

#include "json.hpp"
#include "projective.hpp"
#include "srl/corpus_io.hpp"
#include "srl/evaluation.hpp"
#include "test_util.hpp"

using namespace srl;

namespace {

template <class F>
std::string error_code(F&& f) {
  try {
    f();
  } catch (const SrlError& e) {
    return e.code();
  }
  return "";
}

std::vector<SrlGraph> graphs(const std::vector<Sentence>& corpus) {
  std::vector<SrlGraph> out;
  for (const auto& s : corpus) out.push_back(gold_graph(s));
  return out;
}

}  // namespace

TEST(Percent, HalfUp) {
  EXPECT_EQ(percent_2dp(2, 3), 66.67);
  EXPECT_EQ(percent_2dp(1, 2), 50.00);
  EXPECT_EQ(percent_2dp(4, 7), 57.14);
  EXPECT_EQ(percent_2dp(1, 32), 3.13);  // 3.125 rounds up
  EXPECT_EQ(percent_2dp(1, 1600), 0.06);  // 0.0625
  EXPECT_EQ(percent_2dp(0, 0), 0.0);
  EXPECT_EQ(percent_2dp(5, 5), 100.0);
}

TEST(Evaluate, SpecExamples) {
  SrlGraph g({{2, {1, 1}, "A0"}});
  auto r = evaluate({g}, {g}, PredicateMode::EndToEnd, Style::Span);
  EXPECT_EQ(r.precision, 100.0);
  EXPECT_EQ(r.recall, 100.0);
  EXPECT_EQ(r.f1, 100.0);
  auto b = evaluate({SrlGraph({{2, {1, 2}, "A0"}})}, {g}, PredicateMode::EndToEnd, Style::Span);
  EXPECT_EQ(b.f1, 0.0);
  EXPECT_EQ(b.precision, 0.0);
  SrlGraph pred({{2, {1, 1}, "A0"}, {2, {3, 3}, "A1"}, {2, {4, 5}, "A2"}});
  SrlGraph gold({{2, {1, 1}, "A0"}, {2, {3, 3}, "A1"}, {4, {3, 3}, "A0"}, {4, {5, 5}, "A1"}});
  auto c = evaluate({pred}, {gold}, PredicateMode::EndToEnd, Style::Span);
  EXPECT_EQ(c.precision, 66.67);
  EXPECT_EQ(c.recall, 50.00);
  EXPECT_EQ(c.f1, 57.14);
  EXPECT_EQ(c.matched, 2);
}

TEST(Evaluate, LengthMismatch) {
  EXPECT_EQ(error_code([] {
              evaluate({SrlGraph()}, {}, PredicateMode::EndToEnd, Style::Dep);
            }),
            "LengthMismatch");
}

TEST(Evaluate, SelfAndSymmetry) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) {
    std::vector<Sentence> a, b;
    for (int s = 0; s < 3; ++s) {
      a.push_back(testutil::random_sentence(rng, 8, Style::Span, false));
      b.push_back(testutil::random_sentence(rng, 8, Style::Span, false));
    }
    auto self = evaluate(graphs(a), graphs(a), PredicateMode::EndToEnd, Style::Span);
    if (self.gold > 0) {
      EXPECT_EQ(self.f1, 100.0);
      EXPECT_EQ(self.precision, 100.0);
    }
    auto ab = evaluate(graphs(a), graphs(b), PredicateMode::EndToEnd, Style::Span);
    auto ba = evaluate(graphs(b), graphs(a), PredicateMode::EndToEnd, Style::Span);
    EXPECT_EQ(ab.precision, ba.recall);
    EXPECT_EQ(ab.recall, ba.precision);
    EXPECT_EQ(ab.f1, ba.f1);
    EXPECT_LE(ab.matched, std::min(ab.predicted, ab.gold));
  }
}

TEST(Evaluate, MetricFixtures) {
  auto expected = nlohmann::json::parse(read_file(testutil::fixture("metrics/expected.json")));
  ASSERT_EQ(expected.size(), 10u);
  for (const auto& e : expected) {
    const std::string c = e["case"];
    const std::string mode = e["mode"];
    const std::string pred_file = mode == "end-to-end" ? ".pred_e2e.jsonl" : ".pred_pi.jsonl";
    auto gold = load_corpus(testutil::fixture("metrics/" + c + ".gold.jsonl"));
    auto pred = load_corpus(testutil::fixture("metrics/" + c + pred_file));
    auto r = evaluate(graphs(pred), graphs(gold), parse_predicate_mode(mode),
                      parse_style(e["style"]));
    EXPECT_EQ(r.matched, e["matched"].get<long>()) << c << " " << mode;
    EXPECT_EQ(r.predicted, e["predicted"].get<long>()) << c << " " << mode;
    EXPECT_EQ(r.gold, e["gold"].get<long>()) << c << " " << mode;
    EXPECT_EQ(r.precision, e["precision"].get<double>()) << c << " " << mode;
    EXPECT_EQ(r.recall, e["recall"].get<double>()) << c << " " << mode;
    EXPECT_EQ(r.f1, e["f1"].get<double>()) << c << " " << mode;
  }
}

TEST(Report, JsonAndTable) {
  auto r = make_report(2, 3, 4, PredicateMode::PreIdentified, Style::Dep);
  auto j = nlohmann::json::parse(r.to_json());
  EXPECT_EQ(j["precision"], 66.67);
  EXPECT_EQ(j["mode"], "pre-identified");
  EXPECT_EQ(j["style"], "DEP");
  EXPECT_EQ(j["matched"], 2);
  EXPECT_NE(r.to_table().find("57.14"), std::string::npos);
}

TEST(SpanToDep, Examples) {
  // span (2,4), heads 1->2? irrelevant; 2->3, 3->5, 4->3
  std::vector<int> heads = {2, 3, 5, 3, 0};
  auto out = span_to_dep(SrlGraph({{1, {2, 4}, "A1"}}), heads);
  EXPECT_EQ(out.tuples(), (std::vector<Tuple>{{1, {3, 3}, "A1"}}));
  auto w1 = span_to_dep(SrlGraph({{5, {2, 2}, "A0"}}), heads);
  EXPECT_EQ(w1.tuples(), (std::vector<Tuple>{{5, {2, 2}, "A0"}}));
  // 1->3, 2->4: both heads leave the span
  std::vector<int> h2 = {3, 4, 0, 3};
  auto multi = span_to_dep(SrlGraph({{3, {1, 2}, "A0"}}), h2);
  EXPECT_EQ(multi.tuples(), (std::vector<Tuple>{{3, {1, 1}, "A0"}, {3, {2, 2}, "A0"}}));
}

TEST(SpanToDep, Errors) {
  SrlGraph g({{1, {1, 1}, "A0"}});
  EXPECT_EQ(error_code([&] { span_to_dep(g, {}); }), "MissingSyntax");
  EXPECT_EQ(error_code([&] { span_to_dep(g, {2, 1}); }), "MultipleRoots");
  EXPECT_EQ(error_code([&] { span_to_dep(g, {0, 3, 2}); }), "CyclicHeads");
  EXPECT_EQ(error_code([&] { span_to_dep(g, {0, 0}); }), "MultipleRoots");
}

TEST(SpanToDep, ProjectiveProperties) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 15);
    auto heads = testutil::random_projective_heads(n, rng);
    ASSERT_NO_THROW(check_heads(heads));
    for (int i = 1; i <= n; ++i)
      for (int j = i; j <= n; ++j) {
        auto out = span_to_dep(SrlGraph({{1, {i, j}, "A1"}}), heads);
        ASSERT_FALSE(out.empty());
        for (const auto& t : out.tuples()) ASSERT_TRUE(SpanRef({i, j}).contains(t.argument.start));
      }
    std::vector<Tuple> w1;
    for (int t = 1; t <= n; ++t) w1.push_back({1, {t, t}, "A" + std::to_string(t % 3)});
    SrlGraph g(w1);
    ASSERT_EQ(span_to_dep(g, heads), g);
  }
}

TEST(SpanToDep, ToyFixtureMatchesDependencyFile) {
  auto span = load_corpus(testutil::fixture("toy_span.jsonl"));
  auto dep = load_corpus(testutil::fixture("toy_dep.jsonl"));
  ASSERT_EQ(span.size(), dep.size());
  for (std::size_t k = 0; k < span.size(); ++k)
    EXPECT_EQ(span_to_dep(gold_graph(span[k]), *span[k].gold_heads), gold_graph(dep[k])) << k;
}

TEST(CompareStyles, IdenticalGraphsZeroDelta) {
  auto dep = load_corpus(testutil::fixture("toy_dep.jsonl"));
  auto g = graphs(dep);
  auto cmp = compare_styles(g, g, dep, PredicateMode::EndToEnd);
  EXPECT_EQ(cmp.delta_f1, 0.0);
  EXPECT_EQ(cmp.dependency.f1, 100.0);
}

TEST(CompareStyles, OneBoundaryError) {
  auto span = load_corpus(testutil::fixture("toy_span.jsonl"));
  auto dep = load_corpus(testutil::fixture("toy_dep.jsonl"));
  span.resize(5);
  dep.resize(5);
  // sentence 0: "John chased the dog in the park ." AM-LOC (5,7) predicted as (6,7);
  // its head becomes token 7 instead of 5
  std::vector<Tuple> t0 = span[0].gold_tuples;
  ASSERT_EQ(t0[2].argument, (SpanRef{5, 7}));
  t0[2].argument = {6, 7};
  std::vector<SrlGraph> span_pred = graphs(span);
  span_pred[0] = SrlGraph(t0);
  auto cmp = compare_styles(span_pred, graphs(dep), dep, PredicateMode::EndToEnd);
  // 18 gold dependency tuples over the five sentences
  EXPECT_EQ(cmp.dependency.gold, 18);
  EXPECT_EQ(cmp.dependency.f1, 100.0);
  EXPECT_EQ(cmp.span_converted.matched, 17);
  EXPECT_EQ(cmp.span_converted.precision, 94.44);
  EXPECT_EQ(cmp.span_converted.recall, 94.44);
  EXPECT_EQ(cmp.span_converted.f1, 94.44);
  EXPECT_EQ(cmp.delta_f1, 5.56);
}

TEST(CompareStyles, NominalPredicatesDropped) {
  auto s = make_sentence({"a", "b", "c"}, {{2, {1, 1}, "A0"}, {3, {1, 1}, "A0"}}, Style::Dep,
                         std::vector<int>{2, 0, 2}, {}, {3});
  SrlGraph dep_pred({{2, {1, 1}, "A0"}});
  SrlGraph span_pred({{2, {1, 1}, "A0"}, {3, {1, 2}, "A1"}});
  auto cmp = compare_styles({span_pred}, {dep_pred}, {s}, PredicateMode::EndToEnd);
  EXPECT_EQ(cmp.dependency.gold, 1);
  EXPECT_EQ(cmp.dependency.f1, 100.0);
  EXPECT_EQ(cmp.span_converted.f1, 100.0);
}
