// srl: train, predict, evaluate, convert and compare from the command line.
//
// Exit codes: 0 ok, 1 computation failure (bad data, mismatched inputs,
// incompatible checkpoint), 2 usage error (bad flags, missing paths).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "srl/corpus_io.hpp"
#include "srl/evaluation.hpp"
#include "srl/network.hpp"
#include "srl/trainer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void log_line(const json& j) { std::cerr << j.dump() << '\n' << std::flush; }

void require_file(const std::string& flag, const std::string& path) {
  if (path.empty()) throw UsageError(flag + " is required");
  if (!fs::is_regular_file(path)) throw UsageError(flag + ": no such file: " + path);
}

srl::ConstraintSet parse_constraints(const std::string& text) {
  srl::ConstraintSet c;
  if (text == "none" || text.empty()) return c;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "U") c.unique_core = true;
    else if (item == "C") c.continuation = true;
    else if (item == "R") c.reference = true;
    else if (item == "O") c.non_overlap = true;
    else throw UsageError("unknown constraint '" + item + "' (use U,C,R,O or none)");
  }
  return c;
}

std::string constraints_string(const srl::ConstraintSet& c) {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(c.unique_core, "U");
  add(c.continuation, "C");
  add(c.reference, "R");
  add(c.non_overlap, "O");
  return out.empty() ? "none" : out;
}

std::vector<srl::SrlGraph> graphs_of(const std::vector<srl::Sentence>& sentences) {
  std::vector<srl::SrlGraph> out;
  for (const auto& s : sentences) out.push_back(srl::gold_graph(s));
  return out;
}

void write_corpus(const std::string& path, const std::string& format,
                  const std::vector<srl::Sentence>& sentences) {
  std::string text = format == "conll" ? srl::emit_conll(sentences) : srl::emit_jsonl(sentences);
  if (path.empty() || path == "-") std::cout << text;
  else srl::write_file(path, text);
}

std::string format_for(const std::string& format, const std::string& path) {
  if (format != "auto") return format;
  fs::path p(path);
  return (p.extension() == ".jsonl" || p.extension() == ".json" || path.empty() || path == "-")
             ? "jsonl"
             : "conll";
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string train, dev, out, config, embeddings, ext_train, ext_dev;
  std::string style, mode = "end-to-end", constraints;
  std::optional<std::uint64_t> seed;
  int epochs = -1;
  int min_freq = 1;
  std::optional<double> stop_at;
  // model overrides
  std::optional<int> word_dim, char_dim, char_filters, lstm_layers, lstm_hidden, mlp_dim,
      scorer_mlp_dim, width_dim, max_span_len, batch_size, max_epochs;
  std::optional<double> dropout_embed, dropout_hidden, dropout_recurrent, beam_pred, beam_arg, lr;
};

int run_train(const TrainArgs& a) {
  require_file("--train", a.train);
  if (!a.dev.empty()) require_file("--dev", a.dev);
  if (!a.config.empty()) require_file("--config", a.config);
  if (!a.embeddings.empty()) require_file("--embeddings", a.embeddings);
  if (!a.ext_train.empty()) require_file("--external-train", a.ext_train);
  if (!a.ext_dev.empty()) require_file("--external-dev", a.ext_dev);
  if (!a.seed) throw UsageError("--seed is required for train");
  if (a.out.empty()) throw UsageError("--out is required");

  srl::ModelConfig cfg;
  if (!a.style.empty() && srl::parse_style(a.style) == srl::Style::Dep) cfg = srl::ModelConfig::dep_defaults();
  if (!a.config.empty()) {
    cfg = srl::ModelConfig::from_json(srl::read_file(a.config));
  }
  // flags win over the file
  if (!a.style.empty()) {
    if (srl::parse_style(a.style) == srl::Style::Dep) cfg.max_span_len = 1;
    else if (cfg.max_span_len == 1) cfg.max_span_len = srl::ModelConfig{}.max_span_len;
  }
  auto set = [](auto& field, const auto& opt) {
    if (opt) field = *opt;
  };
  set(cfg.word_dim, a.word_dim);
  set(cfg.char_dim, a.char_dim);
  set(cfg.char_filters, a.char_filters);
  set(cfg.lstm_layers, a.lstm_layers);
  set(cfg.lstm_hidden, a.lstm_hidden);
  set(cfg.mlp_dim, a.mlp_dim);
  set(cfg.scorer_mlp_dim, a.scorer_mlp_dim);
  set(cfg.width_dim, a.width_dim);
  set(cfg.max_span_len, a.max_span_len);
  set(cfg.batch_size, a.batch_size);
  set(cfg.max_epochs, a.max_epochs);
  set(cfg.dropout_embed, a.dropout_embed);
  set(cfg.dropout_hidden, a.dropout_hidden);
  set(cfg.dropout_recurrent, a.dropout_recurrent);
  set(cfg.beam_pred, a.beam_pred);
  set(cfg.beam_arg, a.beam_arg);
  set(cfg.lr, a.lr);

  std::optional<srl::ExternalEmbeddings> ext_train, ext_dev;
  if (!a.ext_train.empty()) {
    ext_train = srl::ExternalEmbeddings::load(a.ext_train);
    if (cfg.ext_dim == 0) cfg.ext_dim = ext_train->dim();
  }
  if (!a.ext_dev.empty()) ext_dev = srl::ExternalEmbeddings::load(a.ext_dev);
  cfg.validate();

  srl::TrainOptions opts;
  opts.config = cfg;
  opts.seed = *a.seed;
  opts.epochs = a.epochs;
  opts.min_freq = a.min_freq;
  opts.mode = srl::parse_predicate_mode(a.mode);
  if (!a.constraints.empty()) opts.constraints = parse_constraints(a.constraints);
  if (!a.embeddings.empty()) opts.pretrained = fs::path(a.embeddings);
  opts.train_external = ext_train ? &*ext_train : nullptr;
  opts.dev_external = ext_dev ? &*ext_dev : nullptr;
  opts.stop_at_f1 = a.stop_at;
  opts.out_dir = fs::path(a.out);
  opts.on_epoch = [](const srl::EpochLog& e) { log_line(json::parse(e.to_json())); };

  const auto train_set = srl::load_corpus(a.train);
  const auto dev_set = a.dev.empty() ? std::vector<srl::Sentence>{} : srl::load_corpus(a.dev);

  json run;
  run["event"] = "config";
  run["subcommand"] = "train";
  run["train"] = a.train;
  run["dev"] = a.dev;
  run["seed"] = *a.seed;
  run["epochs"] = a.epochs;
  run["mode"] = a.mode;
  run["constraints"] =
      constraints_string(opts.constraints.value_or(srl::default_constraints(cfg.style())));
  run["model"] = json::parse(cfg.to_json());
  fs::create_directories(a.out);
  srl::write_file(fs::path(a.out) / "run_config.json", run.dump(2) + "\n");
  log_line(run);

  srl::TrainResult result = srl::train(train_set, dev_set, opts);
  json done;
  done["event"] = "done";
  done["best_epoch"] = result.best_epoch;
  done["best_f1"] = result.best_f1;
  done["checkpoint"] = (fs::path(a.out) / "best.ckpt").string();
  log_line(done);
  return 0;
}

// ---- predict --------------------------------------------------------------

struct PredictArgs {
  std::string checkpoint, input, output, format = "auto", mode = "end-to-end", constraints,
                                         external;
};

int run_predict(const PredictArgs& a) {
  require_file("--checkpoint", a.checkpoint);
  require_file("--input", a.input);
  if (!a.external.empty()) require_file("--external", a.external);

  srl::Model model = srl::Model::load(a.checkpoint);
  const auto sentences = srl::load_corpus(a.input);
  std::optional<srl::ExternalEmbeddings> ext;
  if (!a.external.empty()) ext = srl::ExternalEmbeddings::load(a.external);

  srl::PredictOptions opts;
  opts.mode = srl::parse_predicate_mode(a.mode);
  opts.constraints = a.constraints.empty() ? srl::default_constraints(model.config().style())
                                           : parse_constraints(a.constraints);
  opts.external = ext ? &*ext : nullptr;

  json run;
  run["event"] = "config";
  run["subcommand"] = "predict";
  run["checkpoint"] = a.checkpoint;
  run["input"] = a.input;
  run["mode"] = a.mode;
  run["constraints"] = constraints_string(opts.constraints);
  log_line(run);

  const auto graphs = srl::predict(model, sentences, opts);
  std::vector<srl::Sentence> out;
  for (std::size_t k = 0; k < sentences.size(); ++k)
    out.push_back(srl::with_tuples(sentences[k], graphs[k]));
  write_corpus(a.output, format_for(a.format, a.output), out);
  return 0;
}

// ---- evaluate -------------------------------------------------------------

struct EvalArgs {
  std::string pred, gold, mode = "end-to-end", style, output = "both";
};

void print_report(const srl::EvalReport& r, const std::string& output) {
  if (output == "table" || output == "both") std::cout << r.to_table();
  if (output == "json" || output == "both") std::cout << r.to_json() << '\n';
}

int run_evaluate(const EvalArgs& a) {
  require_file("--pred", a.pred);
  require_file("--gold", a.gold);
  const auto pred = srl::load_corpus(a.pred);
  const auto gold = srl::load_corpus(a.gold);
  srl::Style style = srl::Style::Dep;
  if (!a.style.empty()) {
    style = srl::parse_style(a.style);
  } else {
    for (const auto& s : gold)
      if (s.mode == srl::Style::Span) style = srl::Style::Span;
  }
  auto report = srl::evaluate(graphs_of(pred), graphs_of(gold), srl::parse_predicate_mode(a.mode), style);
  print_report(report, a.output);
  return 0;
}

// ---- convert --------------------------------------------------------------

struct ConvertArgs {
  std::string input, output, format = "auto";
};

int run_convert(const ConvertArgs& a) {
  require_file("--input", a.input);
  const auto sentences = srl::load_corpus(a.input);
  std::vector<srl::Sentence> out;
  for (std::size_t k = 0; k < sentences.size(); ++k) {
    const auto& s = sentences[k];
    if (!s.gold_heads)
      throw srl::SrlError("MissingSyntax", "sentence " + std::to_string(k) + " has no heads");
    srl::Sentence d = srl::with_tuples(s, srl::span_to_dep(srl::gold_graph(s), *s.gold_heads));
    d.predicates = s.predicates;
    d.mode = srl::Style::Dep;
    out.push_back(std::move(d));
  }
  write_corpus(a.output, format_for(a.format, a.output), out);
  return 0;
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
  std::string span_pred, dep_pred, gold, mode = "end-to-end";
};

int run_compare(const CompareArgs& a) {
  require_file("--span-pred", a.span_pred);
  require_file("--dep-pred", a.dep_pred);
  require_file("--gold", a.gold);
  const auto span = srl::load_corpus(a.span_pred);
  const auto dep = srl::load_corpus(a.dep_pred);
  const auto gold = srl::load_corpus(a.gold);
  auto cmp = srl::compare_styles(graphs_of(span), graphs_of(dep), gold, srl::parse_predicate_mode(a.mode));
  std::printf("dependency             F1 %6.2f\n", cmp.dependency.f1);
  std::printf("span -> dependency     F1 %6.2f\n", cmp.span_converted.f1);
  std::printf("delta                     %6.2f\n", cmp.delta_f1);
  json j;
  j["dependency"] = json::parse(cmp.dependency.to_json());
  j["span_converted"] = json::parse(cmp.span_converted.to_json());
  j["delta_f1"] = cmp.delta_f1;
  std::cout << j.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"span and dependency semantic role labeling"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "train a model; writes best.ckpt and train_log.jsonl");
  train->add_option("--train", ta.train, "training corpus (.jsonl or column format)");
  train->add_option("--dev", ta.dev, "development corpus (default: training corpus)");
  train->add_option("--out", ta.out, "output directory");
  train->add_option("--config", ta.config, "JSON model config; flags override it");
  train->add_option("--seed", ta.seed, "root seed for init, dropout and shuffling");
  train->add_option("--style", ta.style, "SPAN or DEP (sets max span length)");
  train->add_option("--mode", ta.mode, "end-to-end or pre-identified");
  train->add_option("--constraints", ta.constraints, "decoder constraints, e.g. U,O or none");
  train->add_option("--epochs", ta.epochs, "epochs to run (default: config max_epochs)");
  train->add_option("--min-freq", ta.min_freq, "word frequency cutoff for the vocabulary");
  train->add_option("--stop-at-f1", ta.stop_at, "stop when dev F1 reaches this value");
  train->add_option("--embeddings", ta.embeddings, "pretrained word vectors, text format");
  train->add_option("--external-train", ta.ext_train, "external token vectors for --train");
  train->add_option("--external-dev", ta.ext_dev, "external token vectors for --dev");
  train->add_option("--word-dim", ta.word_dim);
  train->add_option("--char-dim", ta.char_dim);
  train->add_option("--char-filters", ta.char_filters);
  train->add_option("--lstm-layers", ta.lstm_layers);
  train->add_option("--lstm-hidden", ta.lstm_hidden);
  train->add_option("--mlp-dim", ta.mlp_dim);
  train->add_option("--scorer-mlp-dim", ta.scorer_mlp_dim);
  train->add_option("--width-dim", ta.width_dim);
  train->add_option("--max-span-len", ta.max_span_len);
  train->add_option("--batch-size", ta.batch_size);
  train->add_option("--max-epochs", ta.max_epochs);
  train->add_option("--dropout-embed", ta.dropout_embed);
  train->add_option("--dropout-hidden", ta.dropout_hidden);
  train->add_option("--dropout-recurrent", ta.dropout_recurrent);
  train->add_option("--beam-pred", ta.beam_pred);
  train->add_option("--beam-arg", ta.beam_arg);
  train->add_option("--lr", ta.lr);

  PredictArgs pa;
  auto* predict = app.add_subcommand("predict", "label a corpus with a trained checkpoint");
  predict->add_option("--checkpoint", pa.checkpoint, "model file from train");
  predict->add_option("--input", pa.input, "corpus to label");
  predict->add_option("--output", pa.output, "output path (default stdout)");
  predict->add_option("--format", pa.format, "jsonl, conll or auto (by extension)");
  predict->add_option("--mode", pa.mode, "end-to-end or pre-identified");
  predict->add_option("--constraints", pa.constraints, "decoder constraints, e.g. U,O or none");
  predict->add_option("--external", pa.external, "external token vectors for --input");

  EvalArgs ea;
  auto* evaluate = app.add_subcommand("evaluate", "precision, recall and F1 against gold");
  evaluate->add_option("--pred", ea.pred, "predicted corpus");
  evaluate->add_option("--gold", ea.gold, "gold corpus");
  evaluate->add_option("--mode", ea.mode, "end-to-end or pre-identified");
  evaluate->add_option("--style", ea.style, "SPAN or DEP (default: from gold)");
  evaluate->add_option("--output", ea.output, "table, json or both");

  ConvertArgs ca;
  auto* convert = app.add_subcommand("convert", "span arguments to their syntactic heads");
  convert->add_option("--input", ca.input, "span corpus with heads");
  convert->add_option("--output", ca.output, "output path (default stdout)");
  convert->add_option("--format", ca.format, "jsonl, conll or auto (by extension)");

  CompareArgs cma;
  auto* compare = app.add_subcommand("compare", "dependency vs span-converted dependency F1");
  compare->add_option("--span-pred", cma.span_pred, "span predictions");
  compare->add_option("--dep-pred", cma.dep_pred, "dependency predictions");
  compare->add_option("--gold", cma.gold, "gold corpus with heads");
  compare->add_option("--mode", cma.mode, "end-to-end or pre-identified");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train) return run_train(ta);
    if (*predict) return run_predict(pa);
    if (*evaluate) return run_evaluate(ea);
    if (*convert) return run_convert(ca);
    if (*compare) return run_compare(cma);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const srl::SrlError& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.code() == "UnreadableFile" || e.code() == "BadStyle" || e.code() == "BadMode") return 2;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
