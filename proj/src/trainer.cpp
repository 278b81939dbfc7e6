#include "srl/trainer.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include "json.hpp"

namespace srl {

namespace {

const Matrix* external_for(const ExternalEmbeddings* ext, int ordinal, int tokens) {
  if (ext == nullptr || ext->empty()) return nullptr;
  return &ext->at(ordinal, tokens);
}

std::mt19937_64 derived_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace

SrlGraph predict_sentence(Model& model, const Sentence& sentence, const PredictOptions& options,
                          const Matrix* external) {
  ad::Tape tape(false);
  SentenceInput input = index_sentence(sentence, model.vocab(), model.config().ext_dim, external);
  ForwardResult fwd =
      score_sentence(tape, model, input, no_dropout(), options.mode, sentence.predicates);
  return decode_constrained(fwd.table, options.constraints);
}

std::vector<SrlGraph> predict(Model& model, const std::vector<Sentence>& sentences,
                              const PredictOptions& options) {
  if (model.config().style() == Style::Dep) {
    for (const auto& s : sentences)
      if (s.mode == Style::Span)
        throw SrlError("IncompatibleCheckpoint",
                       "dependency model cannot label span-annotated input");
  }
  std::vector<SrlGraph> out;
  out.reserve(sentences.size());
  for (std::size_t k = 0; k < sentences.size(); ++k) {
    const Matrix* ext =
        external_for(options.external, static_cast<int>(k), sentences[k].size());
    out.push_back(predict_sentence(model, sentences[k], options, ext));
  }
  return out;
}

Sentence with_tuples(const Sentence& sentence, const SrlGraph& graph) {
  Sentence out = sentence;
  out.gold_tuples = graph.tuples();
  std::vector<int> preds = graph.predicates();
  if (out.mode == Style::Dep) {
    for (const auto& t : out.gold_tuples)
      if (t.argument.start != t.argument.end) out.mode = Style::Span;
  }
  out.predicates = preds;
  return out;
}

std::string EpochLog::to_json() const {
  nlohmann::ordered_json j;
  j["epoch"] = epoch;
  j["loss"] = loss;
  j["pruning_recall"] = pruning_recall;
  j["dev_p"] = dev.precision;
  j["dev_r"] = dev.recall;
  j["dev_f1"] = dev.f1;
  j["improved"] = improved;
  return j.dump();
}

TrainResult train(const std::vector<Sentence>& train_set, const std::vector<Sentence>& dev_set,
                  const TrainOptions& options) {
  const ModelConfig& cfg = options.config;
  cfg.validate();
  if (train_set.empty()) throw SrlError("EmptyCorpus", "training corpus is empty");
  if (cfg.style() == Style::Dep) {
    for (const auto& s : train_set)
      if (s.mode == Style::Span)
        throw SrlError("IncompatibleCheckpoint", "dependency config on span-annotated corpus");
  }

  Vocabulary vocab = build_vocab(train_set, options.min_freq);
  std::optional<EmbeddingMatrix> pretrained;
  if (options.pretrained) {
    auto rng = derived_stream(options.seed, 3);
    pretrained = load_pretrained(*options.pretrained, vocab, rng);
  }
  Model model(cfg, vocab, options.seed, pretrained ? &*pretrained : nullptr);
  ad::Adam adam(ad::AdamConfig{cfg.lr});
  auto dropout_rng = derived_stream(options.seed, 1);
  auto shuffle_rng = derived_stream(options.seed, 2);

  const std::vector<Sentence>& dev = dev_set.empty() ? train_set : dev_set;
  const ExternalEmbeddings* dev_ext = dev_set.empty() ? options.train_external : options.dev_external;
  PredictOptions popts;
  popts.mode = options.mode;
  popts.constraints = options.constraints.value_or(default_constraints(cfg.style()));
  popts.external = dev_ext;
  std::vector<SrlGraph> dev_gold;
  for (const auto& s : dev) dev_gold.push_back(gold_graph(s));

  std::ofstream log_file;
  if (options.out_dir) {
    std::filesystem::create_directories(*options.out_dir);
    log_file.open(*options.out_dir / "train_log.jsonl");
  }

  TrainResult result;
  const int epochs = options.epochs >= 0 ? options.epochs : cfg.max_epochs;
  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    long gold_total = 0, gold_survived = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      model.params().zero_grad();
      for (std::size_t k = begin; k < end; ++k) {
        const int idx = order[k];
        const Sentence& s = train_set[idx];
        ad::Tape tape;
        SentenceInput input = index_sentence(s, model.vocab(), cfg.ext_dim,
                                             external_for(options.train_external, idx, s.size()));
        DropoutMasks masks = sample_masks(cfg, s.size(), dropout_rng);
        ForwardResult fwd = score_sentence(tape, model, input, masks, options.mode, s.predicates);
        LossResult loss = sentence_loss(tape, fwd, s);
        tape.backward(loss.loss);
        loss_sum += loss.loss.value()(0, 0);
        gold_total += loss.gold_total;
        gold_survived += loss.gold_survived;
      }
      const double inv = 1.0 / static_cast<double>(end - begin);
      for (std::size_t p = 0; p < model.params().size(); ++p) model.params()[p].grad *= inv;
      adam.step(model.params());
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.loss = loss_sum / static_cast<double>(train_set.size());
    entry.pruning_recall =
        gold_total == 0 ? 1.0 : static_cast<double>(gold_survived) / static_cast<double>(gold_total);
    entry.dev = evaluate(predict(model, dev, popts), dev_gold, options.mode, cfg.style());
    if (entry.dev.f1 > result.best_f1) {
      entry.improved = true;
      result.best_f1 = entry.dev.f1;
      result.best_epoch = epoch;
      result.best_checkpoint = model.serialize();
      if (options.out_dir) write_file(*options.out_dir / "best.ckpt", result.best_checkpoint);
    }
    result.log.push_back(entry);
    if (log_file) log_file << entry.to_json() << '\n' << std::flush;
    if (options.on_epoch) options.on_epoch(entry);
    if (options.stop_at_f1 && entry.dev.f1 >= *options.stop_at_f1) break;
  }
  if (result.best_checkpoint.empty()) {
    result.best_checkpoint = model.serialize();
    if (options.out_dir) write_file(*options.out_dir / "best.ckpt", result.best_checkpoint);
  }
  return result;
}

}  // namespace srl
