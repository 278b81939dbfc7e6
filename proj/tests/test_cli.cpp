#include <gtest/gtest.h>
#include <sys/wait.h>

#include <filesystem>

#include "json.hpp"

#include "srl/corpus_io.hpp"
#include "srl/evaluation.hpp"
#include "test_util.hpp"

using namespace srl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;  // stdout
  std::string err;  // stderr
};

class Cli : public ::testing::Test {
 protected:
  fs::path dir;

  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("srl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  Outcome run(const std::string& args) {
    const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd = std::string(SRL_CLI) + " " + args + " >" + out.string() + " 2>" +
                            err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(out), read_file(err)};
  }
  std::string path(const std::string& name) { return (dir / name).string(); }
};

const std::string toy_span = testutil::fixture("toy_span.jsonl");
const std::string toy_dep = testutil::fixture("toy_dep.jsonl");

}  // namespace

TEST_F(Cli, MissingCorpusIsUsageError) {
  auto r = run("train --train " + path("nope.jsonl") + " --out " + path("m") + " --seed 1");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(path("nope.jsonl")), std::string::npos) << r.err;
}

TEST_F(Cli, TrainRequiresSeed) {
  auto r = run("train --train " + toy_span + " --out " + path("m"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("seed"), std::string::npos) << r.err;
}

TEST_F(Cli, EvaluateSelfIsPerfect) {
  auto r = run("evaluate --pred " + toy_span + " --gold " + toy_span + " --output json");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["f1"], 100.0);
  EXPECT_EQ(j["gold"], 72);
  auto t = run("evaluate --pred " + toy_span + " --gold " + toy_span);
  EXPECT_NE(t.out.find("F1 100.00"), std::string::npos) << t.out;
}

TEST_F(Cli, EvaluateLengthMismatch) {
  write_file(path("short.jsonl"), read_file(toy_span).substr(0, read_file(toy_span).find('\n') + 1));
  auto r = run("evaluate --pred " + path("short.jsonl") + " --gold " + toy_span);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("LengthMismatch"), std::string::npos) << r.err;
}

TEST_F(Cli, BadModeIsUsageError) {
  auto r = run("evaluate --pred " + toy_span + " --gold " + toy_span + " --mode sideways");
  EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, ConvertSpanToDependency) {
  auto r = run("convert --input " + toy_span + " --output " + path("conv.jsonl"));
  ASSERT_EQ(r.code, 0) << r.err;
  auto conv = load_corpus(path("conv.jsonl"));
  auto dep = load_corpus(toy_dep);
  ASSERT_EQ(conv.size(), dep.size());
  for (std::size_t k = 0; k < dep.size(); ++k) EXPECT_EQ(gold_graph(conv[k]), gold_graph(dep[k]));
  // width-1 input is a fixed point
  auto again = run("convert --input " + toy_dep + " --output " + path("again.jsonl"));
  ASSERT_EQ(again.code, 0) << again.err;
  auto fixed = load_corpus(path("again.jsonl"));
  for (std::size_t k = 0; k < dep.size(); ++k) EXPECT_EQ(gold_graph(fixed[k]), gold_graph(dep[k]));
}

TEST_F(Cli, CompareIdenticalIsZeroDelta) {
  auto r = run("compare --span-pred " + toy_span + " --dep-pred " + toy_dep + " --gold " + toy_dep);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0.00"), std::string::npos) << r.out;
}

TEST_F(Cli, TrainPredictRoundTrip) {
  write_file(path("cfg.json"), testutil::tiny_config(Style::Dep).to_json());
  auto t = run("train --train " + toy_dep + " --out " + path("m") + " --config " + path("cfg.json") +
               " --seed 3 --epochs 2");
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_TRUE(fs::exists(path("m/best.ckpt")));
  EXPECT_TRUE(fs::exists(path("m/train_log.jsonl")));
  EXPECT_TRUE(fs::exists(path("m/run_config.json")));

  auto p = run("predict --checkpoint " + path("m/best.ckpt") + " --input " + toy_dep + " --output " +
               path("pred.jsonl"));
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(load_corpus(path("pred.jsonl")).size(), 20u);

  // empty input gives empty output
  write_file(path("empty.jsonl"), "");
  auto e = run("predict --checkpoint " + path("m/best.ckpt") + " --input " + path("empty.jsonl"));
  EXPECT_EQ(e.code, 0) << e.err;
  EXPECT_TRUE(e.out.empty());

  auto bad = run("predict --checkpoint " + path("m/best.ckpt") + " --input " + toy_span);
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("IncompatibleCheckpoint"), std::string::npos) << bad.err;
}
