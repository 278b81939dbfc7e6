#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "srl/autodiff.hpp"
#include "srl/corpus_io.hpp"
#include "srl/data_model.hpp"
#include "srl/pruning_inference.hpp"

namespace srl {

struct ModelConfig {
  int word_dim = 300;
  int char_dim = 8;
  std::vector<int> char_windows = {3, 4, 5};
  int char_filters = 50;
  int ext_dim = 0;
  int lstm_layers = 3;
  int lstm_hidden = 200;
  int mlp_dim = 300;
  int scorer_mlp_dim = 150;
  int width_dim = 20;
  double dropout_embed = 0.5;
  double dropout_hidden = 0.2;
  double dropout_recurrent = 0.4;
  int max_span_len = 30;  // 1 selects dependency arguments
  double beam_pred = 0.4;
  double beam_arg = 0.8;
  double lr = 0.001;
  int batch_size = 40;
  int max_epochs = 600;

  static ModelConfig span_defaults() { return {}; }
  static ModelConfig dep_defaults() {
    ModelConfig c;
    c.max_span_len = 1;
    return c;
  }

  Style style() const { return max_span_len == 1 ? Style::Dep : Style::Span; }
  int token_dim() const {
    return char_filters * static_cast<int>(char_windows.size()) + word_dim + ext_dim;
  }
  int context_dim() const { return 2 * lstm_hidden; }
  int argument_dim() const {
    return style() == Style::Dep ? mlp_dim : 3 * mlp_dim + width_dim;
  }

  // Throws BadConfig naming the offending field.
  void validate() const;
  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);

  bool operator==(const ModelConfig&) const = default;
};

// Width buckets {1, 2, 3, 4, 5-7, 8-15, 16+} -> 0..6.
inline constexpr int kWidthBuckets = 7;
int width_bucket(int width);

// A sentence mapped onto vocabulary indices.
struct SentenceInput {
  std::vector<int> word_ids;
  std::vector<std::vector<int>> char_ids;
  Matrix external;  // n x ext_dim, empty when ext_dim == 0

  int size() const { return static_cast<int>(word_ids.size()); }
};

SentenceInput index_sentence(const Sentence& sentence, const Vocabulary& vocab, int ext_dim,
                             const Matrix* external = nullptr);

// Inverted-dropout masks, sampled once per sentence. The recurrent masks are
// 1 x hidden rows reused at every timestep. Empty matrices mean "no dropout".
struct DropoutMasks {
  Matrix word;                    // n x word_dim
  Matrix chars;                   // n x (windows * filters)
  std::vector<Matrix> recurrent;  // [layer * 2 + direction]
  Matrix pred_hidden;             // n x mlp_dim
  Matrix arg_hidden;              // n x mlp_dim
  Matrix width;                   // spans x width_dim
};

DropoutMasks no_dropout();
DropoutMasks sample_masks(const ModelConfig& config, int n, std::mt19937_64& rng);

class Model {
 public:
  // Initialises every parameter from `seed`. `pretrained` supplies the word
  // table; otherwise it is drawn at random.
  Model(ModelConfig config, Vocabulary vocab, std::uint64_t seed,
        const EmbeddingMatrix* pretrained = nullptr);

  const ModelConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  const RoleInventory& roles() const { return vocab_.roles(); }
  ad::ParameterSet& params() { return params_; }
  const ad::ParameterSet& params() const { return params_; }
  ad::Parameter& param(const std::string& name) { return params_.get(name); }

  // One versioned file: header, config + vocabulary JSON, tensor container.
  std::string serialize() const;
  static Model deserialize(std::string_view blob);
  void save(const std::filesystem::path& path) const;
  static Model load(const std::filesystem::path& path);

 private:
  ModelConfig config_;
  Vocabulary vocab_;
  ad::ParameterSet params_;
};

// x = [w_char, w_word, w_ext], n x token_dim.
ad::Var token_representation(ad::Tape& tape, Model& model, const SentenceInput& input,
                             const DropoutMasks& masks);

// Character CNN for one word: 1 x (windows * filters).
ad::Var char_cnn(ad::Tape& tape, Model& model, const std::vector<int>& char_ids);

// Stacked BiLSTM with gated highway connections from the second layer on.
// n x token_dim -> n x 2 * lstm_hidden.
ad::Var encode(ad::Tape& tape, Model& model, ad::Var tokens, const DropoutMasks& masks);

struct CandidateReps {
  ad::Var pred;       // g^p, n x mlp_dim
  ad::Var arg;        // g^a, n x mlp_dim
  ad::Var arg_final;  // one row per candidate span
  ad::Var attention;  // mu, n x 1 (span mode only)
};

// Span mode: [g_start, g_end, h_span, width embedding], with h_span the
// softmax(mu)-weighted sum of g^a over the span. Dep mode: g^a directly.
CandidateReps candidate_representations(ad::Tape& tape, Model& model, ad::Var context,
                                        const std::vector<SpanRef>& spans,
                                        const DropoutMasks& masks);

// Attention-weighted sum of `values` rows over [begin, begin + width).
ad::Var span_head(ad::Var attention, ad::Var values, int begin, int width);

struct UnaryScores {
  ad::Var pred;  // n x 1
  ad::Var arg;   // spans x 1
};

UnaryScores unary_scores(ad::Tape& tape, Model& model, const CandidateReps& reps);

// Rows of g^p against rows of g^a_f: (|P| * |A|) x |roles|, row i*|A|+j.
ad::Var biaffine_scores(ad::Tape& tape, Model& model, ad::Var pred_rows, ad::Var arg_rows);

// phi(p, a, r) = phi_p + phi_a + Phi_r(p, a) for r != null, 0 for the null
// label.
double tuple_score(double phi_p, double phi_a, double relation, int role);

struct ForwardResult {
  ScoreTable table;
  ad::Var scores;                    // rows of `table.scores`, differentiable
  std::vector<int> pred_candidates;  // 0-based token positions kept
  std::vector<int> arg_candidates;   // indices into `spans` kept
  std::vector<SpanRef> spans;        // all argument candidates
};

// Runs the network up to the pruned, ε-pinned score table.
ForwardResult score_sentence(ad::Tape& tape, Model& model, const SentenceInput& input,
                             const DropoutMasks& masks, PredicateMode mode,
                             const std::vector<int>& gold_predicates = {});

struct LossResult {
  ad::Var loss;
  int gold_total = 0;     // gold tuples
  int gold_survived = 0;  // gold tuples whose pair survived pruning
};

// Sum over surviving pairs of -log softmax(scores)[gold role], with the null
// label as target for pairs absent from gold.
LossResult sentence_loss(ad::Tape& tape, const ForwardResult& fwd, const Sentence& gold);

// Cross entropy for an explicit list of per-pair gold role indices.
ad::Var pair_loss(ad::Var scores, const std::vector<int>& gold_roles);

}  // namespace srl
