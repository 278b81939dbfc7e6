#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srl/corpus_io.hpp"
#include "srl/evaluation.hpp"
#include "srl/network.hpp"
#include "srl/pruning_inference.hpp"

namespace srl {

struct PredictOptions {
  PredicateMode mode = PredicateMode::EndToEnd;
  ConstraintSet constraints;
  const ExternalEmbeddings* external = nullptr;
};

// Constrained decoding of one sentence on a frozen model. `external` is the
// sentence's row block when the model has an external slot.
SrlGraph predict_sentence(Model& model, const Sentence& sentence, const PredictOptions& options,
                          const Matrix* external = nullptr);

// Throws IncompatibleCheckpoint for span-annotated input on a dependency model.
std::vector<SrlGraph> predict(Model& model, const std::vector<Sentence>& sentences,
                              const PredictOptions& options);

// Copies `sentence` with its gold tuples replaced by `graph`.
Sentence with_tuples(const Sentence& sentence, const SrlGraph& graph);

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;            // mean per sentence
  double pruning_recall = 0.0;  // gold tuples surviving pruning / gold tuples
  EvalReport dev;
  bool improved = false;

  std::string to_json() const;
};

struct TrainOptions {
  ModelConfig config;
  std::uint64_t seed = 0;
  int epochs = -1;  // < 0: config.max_epochs
  int min_freq = 1;
  PredicateMode mode = PredicateMode::EndToEnd;
  std::optional<ConstraintSet> constraints;  // default per style
  std::optional<std::filesystem::path> pretrained;
  const ExternalEmbeddings* train_external = nullptr;
  const ExternalEmbeddings* dev_external = nullptr;
  // Stop once dev F1 reaches this value.
  std::optional<double> stop_at_f1;
  // best.ckpt and train_log.jsonl are written here when set.
  std::optional<std::filesystem::path> out_dir;
  std::function<void(const EpochLog&)> on_epoch;
};

struct TrainResult {
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_f1 = -1.0;
  std::string best_checkpoint;  // serialized model bytes

  Model best_model() const { return Model::deserialize(best_checkpoint); }
};

// Seeds: parameters from `seed`, dropout masks and shuffling from streams
// derived from it. Runs are bit-reproducible on one machine.
TrainResult train(const std::vector<Sentence>& train_set, const std::vector<Sentence>& dev_set,
                  const TrainOptions& options);

}  // namespace srl
