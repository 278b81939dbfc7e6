#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "srl/data_model.hpp"
#include "srl/linalg.hpp"

namespace srl {

// ---------------------------------------------------------------------------
// Column format (tab separated, blank line between sentences):
//
//   ID  FORM  HEAD  FILLPRED  PRED  APRED_1 ... APRED_k
//
// HEAD is a token index (0 = root) or "_" when no syntax is available; a
// sentence must be all-numeric or all "_". FILLPRED is "Y" on predicate rows
// and "_" elsewhere; k equals the number of Y rows. The APRED_m cell of row t
// holds the role of token t for the m-th predicate, or "_".
// ---------------------------------------------------------------------------
std::vector<Sentence> parse_conll(std::string_view text);
std::string emit_conll(const std::vector<Sentence>& sentences);

// ---------------------------------------------------------------------------
// JSON lines, one sentence per line:
//
//   {"tokens": [...], "heads": [...], "predicates": [...],
//    "tuples": [[p, i, j, "role"], ...], "nominal": [...], "mode": "SPAN"}
//
// "heads", "predicates" and "nominal" are optional. Blank lines are skipped.
// ---------------------------------------------------------------------------
std::vector<Sentence> parse_jsonl(std::string_view text);
std::string emit_jsonl(const std::vector<Sentence>& sentences);
std::string emit_jsonl_line(const Sentence& sentence);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Dispatches on extension: ".jsonl"/".json" -> JSONL, anything else -> columns.
std::vector<Sentence> load_corpus(const std::filesystem::path& path);

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  Vocabulary();

  // Exact form, then lowercase, then UNK.
  int word_index(const std::string& word) const;
  int char_index(const std::string& ch) const;

  int word_count() const { return static_cast<int>(words_.size()); }
  int char_count() const { return static_cast<int>(chars_.size()); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::string>& chars() const { return chars_; }
  const RoleInventory& roles() const { return roles_; }
  RoleInventory& roles() { return roles_; }
  std::int64_t frequency(const std::string& word) const;

  int add_word(const std::string& word, std::int64_t count);
  int add_char(const std::string& ch);

  std::string to_json() const;
  static Vocabulary from_json(std::string_view text);
  // FNV-1a over the serialized form; used for checkpoint compatibility.
  std::uint64_t fingerprint() const;

  bool operator==(const Vocabulary& other) const;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> word_index_;
  std::vector<std::int64_t> freq_;
  std::vector<std::string> chars_;
  std::unordered_map<std::string, int> char_index_;
  RoleInventory roles_;
};

Vocabulary build_vocab(const std::vector<Sentence>& corpus, int min_freq = 1);

enum class EmbeddingSource { Random, Pretrained };

struct EmbeddingMatrix {
  Matrix rows;
  EmbeddingSource source = EmbeddingSource::Random;
};

EmbeddingMatrix random_embeddings(const Vocabulary& vocab, int dim,
                                  std::mt19937_64& rng);

// "word v1 ... vd" per line. Vocabulary words found in the file (exact, then
// lowercase) copy their vector; the rest are drawn from U(-0.01, 0.01).
EmbeddingMatrix load_pretrained(const std::filesystem::path& path,
                                const Vocabulary& vocab, std::mt19937_64& rng);
EmbeddingMatrix parse_pretrained(std::string_view text, const Vocabulary& vocab,
                                 std::mt19937_64& rng);

// Per-token contextual vectors supplied from outside the model. JSON lines:
//   {"sentence": k, "vectors": [[...], ...]}
// with k the 0-based ordinal of the sentence in its corpus.
class ExternalEmbeddings {
 public:
  ExternalEmbeddings() = default;
  static ExternalEmbeddings parse(std::string_view text);
  static ExternalEmbeddings load(const std::filesystem::path& path);

  int dim() const { return dim_; }
  bool empty() const { return vectors_.empty(); }
  // Throws MissingExternal when absent, TokenCountMismatch on length drift.
  const Matrix& at(int ordinal, int tokens) const;
  bool contains(int ordinal) const { return vectors_.count(ordinal) > 0; }

 private:
  int dim_ = 0;
  std::map<int, Matrix> vectors_;
};

}  // namespace srl
