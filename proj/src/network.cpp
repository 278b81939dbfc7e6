#include "srl/network.hpp"

#include <algorithm>
#include <cstring>
#include <map>

#include "json.hpp"

namespace srl {

using ad::Var;
using json = nlohmann::ordered_json;

// ---- configuration --------------------------------------------------------

void ModelConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) throw SrlError("BadConfig", std::string(name) + " must be >= 1");
  };
  positive(word_dim, "word_dim");
  positive(char_dim, "char_dim");
  positive(char_filters, "char_filters");
  positive(lstm_layers, "lstm_layers");
  positive(lstm_hidden, "lstm_hidden");
  positive(mlp_dim, "mlp_dim");
  positive(scorer_mlp_dim, "scorer_mlp_dim");
  positive(width_dim, "width_dim");
  positive(max_span_len, "max_span_len");
  positive(batch_size, "batch_size");
  if (ext_dim < 0) throw SrlError("BadConfig", "ext_dim must be >= 0");
  if (max_epochs < 0) throw SrlError("BadConfig", "max_epochs must be >= 0");
  if (char_windows.empty()) throw SrlError("BadConfig", "char_windows is empty");
  for (int w : char_windows) positive(w, "char_windows");
  for (auto [p, name] : {std::pair{dropout_embed, "dropout_embed"},
                         std::pair{dropout_hidden, "dropout_hidden"},
                         std::pair{dropout_recurrent, "dropout_recurrent"}})
    if (!(p >= 0.0 && p < 1.0)) throw SrlError("BadConfig", std::string(name) + " must be in [0, 1)");
  for (auto [b, name] : {std::pair{beam_pred, "beam_pred"}, std::pair{beam_arg, "beam_arg"}})
    if (!(b > 0.0 && b <= 1.0)) throw SrlError("BadConfig", std::string(name) + " must be in (0, 1]");
  if (!(lr > 0.0)) throw SrlError("BadConfig", "lr must be > 0");
}

std::string ModelConfig::to_json() const {
  json j;
  j["word_dim"] = word_dim;
  j["char_dim"] = char_dim;
  j["char_windows"] = char_windows;
  j["char_filters"] = char_filters;
  j["ext_dim"] = ext_dim;
  j["lstm_layers"] = lstm_layers;
  j["lstm_hidden"] = lstm_hidden;
  j["mlp_dim"] = mlp_dim;
  j["scorer_mlp_dim"] = scorer_mlp_dim;
  j["width_dim"] = width_dim;
  j["dropout_embed"] = dropout_embed;
  j["dropout_hidden"] = dropout_hidden;
  j["dropout_recurrent"] = dropout_recurrent;
  j["max_span_len"] = max_span_len;
  j["beam_pred"] = beam_pred;
  j["beam_arg"] = beam_arg;
  j["lr"] = lr;
  j["batch_size"] = batch_size;
  j["max_epochs"] = max_epochs;
  return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SrlError("BadConfig", e.what());
  }
  ModelConfig c;
  try {
    c.word_dim = j.value("word_dim", c.word_dim);
    c.char_dim = j.value("char_dim", c.char_dim);
    c.char_windows = j.value("char_windows", c.char_windows);
    c.char_filters = j.value("char_filters", c.char_filters);
    c.ext_dim = j.value("ext_dim", c.ext_dim);
    c.lstm_layers = j.value("lstm_layers", c.lstm_layers);
    c.lstm_hidden = j.value("lstm_hidden", c.lstm_hidden);
    c.mlp_dim = j.value("mlp_dim", c.mlp_dim);
    c.scorer_mlp_dim = j.value("scorer_mlp_dim", c.scorer_mlp_dim);
    c.width_dim = j.value("width_dim", c.width_dim);
    c.dropout_embed = j.value("dropout_embed", c.dropout_embed);
    c.dropout_hidden = j.value("dropout_hidden", c.dropout_hidden);
    c.dropout_recurrent = j.value("dropout_recurrent", c.dropout_recurrent);
    c.max_span_len = j.value("max_span_len", c.max_span_len);
    c.beam_pred = j.value("beam_pred", c.beam_pred);
    c.beam_arg = j.value("beam_arg", c.beam_arg);
    c.lr = j.value("lr", c.lr);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
  } catch (const json::exception& e) {
    throw SrlError("BadConfig", e.what());
  }
  c.validate();
  return c;
}

int width_bucket(int width) {
  if (width < 1) throw SrlError("BadIndex", "span width must be >= 1");
  if (width <= 4) return width - 1;
  if (width <= 7) return 4;
  if (width <= 15) return 5;
  return 6;
}

// ---- inputs and masks -----------------------------------------------------

SentenceInput index_sentence(const Sentence& sentence, const Vocabulary& vocab, int ext_dim,
                             const Matrix* external) {
  SentenceInput in;
  const int n = sentence.size();
  for (int t = 0; t < n; ++t) {
    in.word_ids.push_back(vocab.word_index(sentence.tokens[t]));
    std::vector<int> chars;
    for (const auto& c : sentence.char_seqs[t]) chars.push_back(vocab.char_index(c));
    in.char_ids.push_back(std::move(chars));
  }
  if (ext_dim > 0) {
    if (external != nullptr) {
      if (external->rows() != n || external->cols() != ext_dim)
        throw SrlError("TokenCountMismatch", "external vectors do not match sentence shape");
      in.external = *external;
    } else {
      in.external = Matrix::Zero(n, ext_dim);
    }
  }
  return in;
}

DropoutMasks no_dropout() { return {}; }

namespace {

Matrix bernoulli_mask(int rows, int cols, double rate, std::mt19937_64& rng) {
  if (rate <= 0.0) return {};
  std::bernoulli_distribution keep(1.0 - rate);
  const double scale = 1.0 / (1.0 - rate);
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = keep(rng) ? scale : 0.0;
  return m;
}

Var maybe_dropout(Var x, const Matrix& mask) {
  return mask.size() == 0 ? x : ad::dropout(x, mask);
}

}  // namespace

DropoutMasks sample_masks(const ModelConfig& c, int n, std::mt19937_64& rng) {
  DropoutMasks m;
  m.word = bernoulli_mask(n, c.word_dim, c.dropout_embed, rng);
  m.chars = bernoulli_mask(n, c.char_filters * static_cast<int>(c.char_windows.size()),
                           c.dropout_embed, rng);
  for (int l = 0; l < c.lstm_layers; ++l)
    for (int d = 0; d < 2; ++d)
      m.recurrent.push_back(bernoulli_mask(1, c.lstm_hidden, c.dropout_recurrent, rng));
  m.pred_hidden = bernoulli_mask(n, c.mlp_dim, c.dropout_hidden, rng);
  m.arg_hidden = bernoulli_mask(n, c.mlp_dim, c.dropout_hidden, rng);
  if (c.style() == Style::Span) {
    int spans = static_cast<int>(enumerate_arguments(n, c.max_span_len).size());
    m.width = bernoulli_mask(spans, c.width_dim, c.dropout_hidden, rng);
  }
  return m;
}

// ---- model ----------------------------------------------------------------

namespace {

std::string lstm_name(int layer, int dir) {
  return "lstm." + std::to_string(layer) + (dir == 0 ? ".fw" : ".bw");
}

int max_window(const ModelConfig& c) {
  return *std::max_element(c.char_windows.begin(), c.char_windows.end());
}

}  // namespace

Model::Model(ModelConfig config, Vocabulary vocab, std::uint64_t seed,
             const EmbeddingMatrix* pretrained)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  config_.validate();
  const ModelConfig& c = config_;
  std::mt19937_64 rng(seed);
  const int roles = vocab_.roles().size();

  if (pretrained != nullptr) {
    if (pretrained->rows.cols() != c.word_dim || pretrained->rows.rows() != vocab_.word_count())
      throw SrlError("BadConfig", "pretrained table shape does not match word_dim/vocabulary");
    params_.add("embed.word", pretrained->rows);
  } else {
    params_.add("embed.word", random_embeddings(vocab_, c.word_dim, rng).rows);
  }
  params_.add("embed.char", ad::glorot_uniform(vocab_.char_count(), c.char_dim, rng));
  for (int w : c.char_windows) {
    const std::string base = "char.conv" + std::to_string(w);
    params_.add(base + ".weight", ad::glorot_uniform(w * c.char_dim, c.char_filters, rng));
    params_.add(base + ".bias", Matrix::Zero(1, c.char_filters));
  }

  int in_dim = c.token_dim();
  const int h = c.lstm_hidden;
  for (int l = 0; l < c.lstm_layers; ++l) {
    for (int d = 0; d < 2; ++d) {
      const std::string base = lstm_name(l, d);
      params_.add(base + ".input", ad::glorot_uniform(in_dim, 4 * h, rng));
      Matrix rec(h, 4 * h);
      for (int g = 0; g < 4; ++g) rec.middleCols(g * h, h) = ad::orthogonal(h, h, rng);
      params_.add(base + ".recurrent", rec);
      Matrix bias = Matrix::Zero(1, 4 * h);
      bias.middleCols(h, h).setOnes();  // forget gate
      params_.add(base + ".bias", bias);
    }
    if (l > 0) {
      const std::string base = "highway." + std::to_string(l);
      params_.add(base + ".gate.weight", ad::glorot_uniform(in_dim, 2 * h, rng));
      params_.add(base + ".gate.bias", Matrix::Zero(1, 2 * h));
      if (in_dim != 2 * h) params_.add(base + ".proj", ad::glorot_uniform(in_dim, 2 * h, rng));
    }
    in_dim = 2 * h;
  }

  params_.add("mlp.pred.weight", ad::glorot_uniform(2 * h, c.mlp_dim, rng));
  params_.add("mlp.pred.bias", Matrix::Zero(1, c.mlp_dim));
  params_.add("mlp.arg.weight", ad::glorot_uniform(2 * h, c.mlp_dim, rng));
  params_.add("mlp.arg.bias", Matrix::Zero(1, c.mlp_dim));

  if (c.style() == Style::Span) {
    params_.add("attn.hidden.weight", ad::glorot_uniform(c.mlp_dim, c.scorer_mlp_dim, rng));
    params_.add("attn.hidden.bias", Matrix::Zero(1, c.scorer_mlp_dim));
    params_.add("attn.out", ad::glorot_uniform(c.scorer_mlp_dim, 1, rng));
    params_.add("width.embed", ad::glorot_uniform(kWidthBuckets, c.width_dim, rng));
  }

  const int da = c.argument_dim();
  params_.add("score.pred.hidden.weight", ad::glorot_uniform(c.mlp_dim, c.scorer_mlp_dim, rng));
  params_.add("score.pred.hidden.bias", Matrix::Zero(1, c.scorer_mlp_dim));
  params_.add("score.pred.out", ad::glorot_uniform(c.scorer_mlp_dim, 1, rng));
  params_.add("score.arg.hidden.weight", ad::glorot_uniform(da, c.scorer_mlp_dim, rng));
  params_.add("score.arg.hidden.bias", Matrix::Zero(1, c.scorer_mlp_dim));
  params_.add("score.arg.out", ad::glorot_uniform(c.scorer_mlp_dim, 1, rng));

  params_.add("biaffine.bilinear", ad::glorot_uniform(c.mlp_dim, roles * da, rng));
  params_.add("biaffine.linear", ad::glorot_uniform(c.mlp_dim + da, roles, rng));
  params_.add("biaffine.bias", Matrix::Zero(1, roles));
}

namespace {

constexpr char kModelMagic[8] = {'S', 'R', 'L', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kModelVersion = 1;

}  // namespace

std::string Model::serialize() const {
  json header;
  header["config"] = json::parse(config_.to_json());
  header["vocab"] = json::parse(vocab_.to_json());
  header["vocab_fingerprint"] = vocab_.fingerprint();
  const std::string head = header.dump();
  std::string out(kModelMagic, sizeof(kModelMagic));
  auto put32 = [&](std::uint32_t v) { out.append(reinterpret_cast<const char*>(&v), 4); };
  auto put64 = [&](std::uint64_t v) { out.append(reinterpret_cast<const char*>(&v), 8); };
  put32(kModelVersion);
  put64(head.size());
  out += head;
  out += params_.serialize();
  return out;
}

Model Model::deserialize(std::string_view blob) {
  if (blob.size() < 20 || std::memcmp(blob.data(), kModelMagic, 8) != 0)
    throw SrlError("CorruptCheckpoint", "not a model checkpoint");
  std::uint32_t version;
  std::uint64_t head_len;
  std::memcpy(&version, blob.data() + 8, 4);
  std::memcpy(&head_len, blob.data() + 12, 8);
  if (version != kModelVersion) throw SrlError("CorruptCheckpoint", "unsupported model version");
  if (blob.size() < 20 + head_len) throw SrlError("CorruptCheckpoint", "truncated header");
  json header;
  try {
    header = json::parse(blob.substr(20, head_len));
  } catch (const json::exception& e) {
    throw SrlError("CorruptCheckpoint", e.what());
  }
  ModelConfig config = ModelConfig::from_json(header.at("config").dump());
  Vocabulary vocab = Vocabulary::from_json(header.at("vocab").dump());
  if (header.at("vocab_fingerprint").get<std::uint64_t>() != vocab.fingerprint())
    throw SrlError("IncompatibleCheckpoint", "vocabulary fingerprint mismatch");
  Model model(std::move(config), std::move(vocab), 0);
  model.params_.deserialize(blob.substr(20 + head_len));
  return model;
}

void Model::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

Model Model::load(const std::filesystem::path& path) { return deserialize(read_file(path)); }

// ---- forward --------------------------------------------------------------

namespace {

Var linear(ad::Tape& tape, Var x, ad::Parameter& weight, ad::Parameter& bias) {
  return ad::add_bias(ad::matmul(x, tape.parameter(weight)), tape.parameter(bias));
}

}  // namespace

Var char_cnn(ad::Tape& tape, Model& model, const std::vector<int>& char_ids) {
  const ModelConfig& c = model.config();
  const int width = std::max(static_cast<int>(char_ids.size()), max_window(c));
  std::vector<int> padded(width, Vocabulary::kPad);
  std::copy(char_ids.begin(), char_ids.end(), padded.begin());
  Var chars = ad::lookup(tape.parameter(model.param("embed.char")), padded);
  std::vector<Var> pooled;
  for (int w : c.char_windows) {
    const std::string base = "char.conv" + std::to_string(w);
    Var conv = ad::matmul(ad::unfold(chars, w), tape.parameter(model.param(base + ".weight")));
    pooled.push_back(ad::add_bias(ad::max_pool(conv), tape.parameter(model.param(base + ".bias"))));
  }
  return ad::tanh(ad::concat(pooled, 1));
}

Var token_representation(ad::Tape& tape, Model& model, const SentenceInput& input,
                         const DropoutMasks& masks) {
  const ModelConfig& c = model.config();
  const int n = input.size();
  if (n < 1) throw SrlError("EmptySentence", "cannot represent an empty sentence");
  std::vector<Var> char_rows;
  for (const auto& chars : input.char_ids) char_rows.push_back(char_cnn(tape, model, chars));
  Var w_char = maybe_dropout(ad::concat(char_rows, 0), masks.chars);
  Var w_word =
      maybe_dropout(ad::lookup(tape.parameter(model.param("embed.word")), input.word_ids), masks.word);
  std::vector<Var> parts = {w_char, w_word};
  if (c.ext_dim > 0) {
    Matrix ext = input.external.size() ? input.external : Matrix::Zero(n, c.ext_dim);
    if (ext.rows() != n || ext.cols() != c.ext_dim)
      throw SrlError("TokenCountMismatch", "external vectors do not match sentence shape");
    parts.push_back(tape.constant(std::move(ext)));
  }
  return ad::concat(parts, 1);
}

namespace {

// One direction of one LSTM layer over the whole sequence; n x hidden.
Var lstm_direction(ad::Tape& tape, Model& model, Var inputs, const std::string& base,
                   bool reverse, const Matrix& mask) {
  const int h = model.config().lstm_hidden;
  const int n = inputs.rows();
  Var projected = linear(tape, inputs, model.param(base + ".input"), model.param(base + ".bias"));
  Var recurrent = tape.parameter(model.param(base + ".recurrent"));
  Var hidden = tape.constant(Matrix::Zero(1, h));
  Var cell = tape.constant(Matrix::Zero(1, h));
  std::vector<Var> outputs(n);
  for (int step = 0; step < n; ++step) {
    const int t = reverse ? n - 1 - step : step;
    Var gates = ad::add(ad::slice_rows(projected, t, 1),
                        ad::matmul(maybe_dropout(hidden, mask), recurrent));
    Var in_gate = ad::sigmoid(ad::slice_cols(gates, 0, h));
    Var forget_gate = ad::sigmoid(ad::slice_cols(gates, h, h));
    Var candidate = ad::tanh(ad::slice_cols(gates, 2 * h, h));
    Var out_gate = ad::sigmoid(ad::slice_cols(gates, 3 * h, h));
    cell = ad::add(ad::mul(forget_gate, cell), ad::mul(in_gate, candidate));
    hidden = ad::mul(out_gate, ad::tanh(cell));
    outputs[t] = hidden;
  }
  return ad::concat(outputs, 0);
}

}  // namespace

Var encode(ad::Tape& tape, Model& model, Var tokens, const DropoutMasks& masks) {
  const ModelConfig& c = model.config();
  if (tokens.rows() < 1) throw SrlError("EmptySentence", "cannot encode an empty sequence");
  static const Matrix kNoMask;
  Var layer_in = tokens;
  for (int l = 0; l < c.lstm_layers; ++l) {
    std::vector<Var> dirs;
    for (int d = 0; d < 2; ++d) {
      const std::size_t k = static_cast<std::size_t>(l * 2 + d);
      const Matrix& mask = k < masks.recurrent.size() ? masks.recurrent[k] : kNoMask;
      dirs.push_back(lstm_direction(tape, model, layer_in, lstm_name(l, d), d == 1, mask));
    }
    Var layer_out = ad::concat(dirs, 1);
    if (l > 0) {
      const std::string base = "highway." + std::to_string(l);
      Var gate = ad::sigmoid(
          linear(tape, layer_in, model.param(base + ".gate.weight"), model.param(base + ".gate.bias")));
      Var carry = model.params().contains(base + ".proj")
                      ? ad::matmul(layer_in, tape.parameter(model.param(base + ".proj")))
                      : layer_in;
      Var keep = ad::add_scalar(ad::scale(gate, -1.0), 1.0);
      layer_out = ad::add(ad::mul(gate, layer_out), ad::mul(keep, carry));
    }
    layer_in = layer_out;
  }
  return layer_in;
}

Var span_head(Var attention, Var values, int begin, int width) {
  if (width == 1) return ad::slice_rows(values, begin, 1);
  Var weights = ad::softmax(ad::slice_rows(attention, begin, width), 0);
  return ad::matmul(ad::transpose(weights), ad::slice_rows(values, begin, width));
}

CandidateReps candidate_representations(ad::Tape& tape, Model& model, Var context,
                                        const std::vector<SpanRef>& spans,
                                        const DropoutMasks& masks) {
  const ModelConfig& c = model.config();
  CandidateReps reps;
  reps.pred = maybe_dropout(
      ad::relu(linear(tape, context, model.param("mlp.pred.weight"), model.param("mlp.pred.bias"))),
      masks.pred_hidden);
  reps.arg = maybe_dropout(
      ad::relu(linear(tape, context, model.param("mlp.arg.weight"), model.param("mlp.arg.bias"))),
      masks.arg_hidden);

  if (c.style() == Style::Dep) {
    std::vector<int> rows;
    for (const auto& s : spans) {
      if (s.start != s.end) throw SrlError("BadIndex", "dependency candidates must be single tokens");
      rows.push_back(s.start - 1);
    }
    bool identity = static_cast<int>(rows.size()) == reps.arg.rows();
    for (std::size_t i = 0; identity && i < rows.size(); ++i) identity = rows[i] == static_cast<int>(i);
    reps.arg_final = identity ? reps.arg : ad::lookup(reps.arg, rows);
    return reps;
  }

  Var hidden = ad::relu(
      linear(tape, reps.arg, model.param("attn.hidden.weight"), model.param("attn.hidden.bias")));
  reps.attention = ad::matmul(hidden, tape.parameter(model.param("attn.out")));

  std::vector<int> starts, ends, buckets;
  std::vector<Var> heads;
  for (const auto& s : spans) {
    starts.push_back(s.start - 1);
    ends.push_back(s.end - 1);
    buckets.push_back(width_bucket(s.width()));
    heads.push_back(span_head(reps.attention, reps.arg, s.start - 1, s.width()));
  }
  Var width = ad::lookup(tape.parameter(model.param("width.embed")), buckets);
  if (masks.width.rows() == static_cast<int>(spans.size())) width = maybe_dropout(width, masks.width);
  reps.arg_final = ad::concat({ad::lookup(reps.arg, starts), ad::lookup(reps.arg, ends),
                               ad::concat(heads, 0), width},
                              1);
  return reps;
}

UnaryScores unary_scores(ad::Tape& tape, Model& model, const CandidateReps& reps) {
  UnaryScores out;
  out.pred = ad::matmul(ad::relu(linear(tape, reps.pred, model.param("score.pred.hidden.weight"),
                                        model.param("score.pred.hidden.bias"))),
                        tape.parameter(model.param("score.pred.out")));
  out.arg = ad::matmul(ad::relu(linear(tape, reps.arg_final, model.param("score.arg.hidden.weight"),
                                       model.param("score.arg.hidden.bias"))),
                       tape.parameter(model.param("score.arg.out")));
  return out;
}

Var biaffine_scores(ad::Tape& tape, Model& model, Var pred_rows, Var arg_rows) {
  return ad::biaffine(pred_rows, arg_rows, tape.parameter(model.param("biaffine.bilinear")),
                      tape.parameter(model.param("biaffine.linear")),
                      tape.parameter(model.param("biaffine.bias")));
}

double tuple_score(double phi_p, double phi_a, double relation, int role) {
  return role == 0 ? 0.0 : phi_p + phi_a + relation;
}

ForwardResult score_sentence(ad::Tape& tape, Model& model, const SentenceInput& input,
                             const DropoutMasks& masks, PredicateMode mode,
                             const std::vector<int>& gold_predicates) {
  const ModelConfig& c = model.config();
  const int n = input.size();
  ForwardResult out;
  out.spans = enumerate_arguments(n, c.max_span_len);

  Var tokens = token_representation(tape, model, input, masks);
  Var context = encode(tape, model, tokens, masks);
  CandidateReps reps = candidate_representations(tape, model, context, out.spans, masks);
  UnaryScores unary = unary_scores(tape, model, reps);

  if (mode == PredicateMode::EndToEnd) {
    std::vector<double> scores(n);
    std::vector<SpanRef> keys(n);
    for (int t = 0; t < n; ++t) {
      scores[t] = unary.pred.value()(t, 0);
      keys[t] = {t + 1, t + 1};
    }
    out.pred_candidates = prune(scores, keys, n, c.beam_pred).ids;
  } else {
    for (int p : gold_predicates) {
      if (p < 1 || p > n) throw SrlError("BadIndex", "gold predicate outside sentence");
      out.pred_candidates.push_back(p - 1);
    }
  }
  std::sort(out.pred_candidates.begin(), out.pred_candidates.end());
  out.pred_candidates.erase(std::unique(out.pred_candidates.begin(), out.pred_candidates.end()),
                            out.pred_candidates.end());

  std::vector<double> arg_scores(out.spans.size());
  for (std::size_t k = 0; k < out.spans.size(); ++k) arg_scores[k] = unary.arg.value()(static_cast<int>(k), 0);
  out.arg_candidates = prune(arg_scores, out.spans, n, c.beam_arg).ids;
  std::sort(out.arg_candidates.begin(), out.arg_candidates.end());

  out.table.sentence_length = n;
  out.table.roles = model.roles();
  for (int p : out.pred_candidates) out.table.predicates.push_back(p + 1);
  for (int a : out.arg_candidates) out.table.arguments.push_back(out.spans[a]);

  const int roles = model.roles().size();
  if (out.pred_candidates.empty() || out.arg_candidates.empty()) {
    out.scores = tape.constant(Matrix(0, roles));
  } else {
    Var pred_rows = ad::lookup(reps.pred, out.pred_candidates);
    Var arg_rows = ad::lookup(reps.arg_final, out.arg_candidates);
    Var relation = biaffine_scores(tape, model, pred_rows, arg_rows);
    out.scores = ad::tuple_scores(ad::lookup(unary.pred, out.pred_candidates),
                                  ad::lookup(unary.arg, out.arg_candidates), relation);
  }
  out.table.scores = out.scores.value();
  return out;
}

Var pair_loss(Var scores, const std::vector<int>& gold_roles) {
  return ad::softmax_cross_entropy(scores, gold_roles);
}

LossResult sentence_loss(ad::Tape& tape, const ForwardResult& fwd, const Sentence& gold) {
  LossResult out;
  const auto& table = fwd.table;
  std::map<std::pair<int, SpanRef>, int> gold_role;
  for (const auto& t : gold.gold_tuples)
    gold_role[{t.predicate, t.argument}] = table.roles.index(t.role);
  out.gold_total = static_cast<int>(gold.gold_tuples.size());

  std::vector<int> targets(table.predicates.size() * table.arguments.size(), 0);
  for (std::size_t i = 0; i < table.predicates.size(); ++i)
    for (std::size_t j = 0; j < table.arguments.size(); ++j) {
      auto it = gold_role.find({table.predicates[i], table.arguments[j]});
      if (it == gold_role.end()) continue;
      targets[table.row(static_cast<int>(i), static_cast<int>(j))] = it->second;
      ++out.gold_survived;
    }
  if (targets.empty()) {
    out.loss = tape.constant(Matrix::Zero(1, 1));
    return out;
  }
  out.loss = pair_loss(fwd.scores, targets);
  return out;
}

}  // namespace srl
