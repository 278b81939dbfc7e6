#include "srl/corpus_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace srl {

using json = nlohmann::ordered_json;

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = line.find(sep, pos);
    out.emplace_back(line.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::optional<int> parse_int(const std::string& s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::string lowercase(const std::string& s) {
  std::string out = s;
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

Sentence conll_block(const std::vector<std::vector<std::string>>& rows,
                     int first_line) {
  const std::string where = " (block starting at line " + std::to_string(first_line) + ")";
  const std::size_t arity = rows.front().size();
  if (arity < 5)
    throw SrlError("ColumnCountMismatch", "fewer than 5 columns" + where);
  const int apred_cols = static_cast<int>(arity) - 5;
  const int n = static_cast<int>(rows.size());

  std::vector<std::string> tokens;
  std::vector<int> heads;
  bool any_head = false, any_missing = false;
  std::vector<int> predicates;
  for (int t = 0; t < n; ++t) {
    const auto& row = rows[t];
    if (row.size() != arity)
      throw SrlError("ColumnCountMismatch",
                     "row " + std::to_string(t + 1) + " has " + std::to_string(row.size()) +
                         " columns, expected " + std::to_string(arity) + where);
    auto id = parse_int(row[0]);
    if (!id || *id != t + 1)
      throw SrlError("BadIndex", "ID column '" + row[0] + "' out of sequence" + where);
    tokens.push_back(row[1]);
    if (row[2] == "_") {
      any_missing = true;
      heads.push_back(0);
    } else {
      auto h = parse_int(row[2]);
      if (!h || *h < 0 || *h > n) throw SrlError("BadIndex", "HEAD '" + row[2] + "'" + where);
      any_head = true;
      heads.push_back(*h);
    }
    if (row[3] == "Y") predicates.push_back(t + 1);
    else if (row[3] != "_")
      throw SrlError("BadIndex", "FILLPRED must be Y or _" + where);
  }
  if (any_head && any_missing)
    throw SrlError("BadIndex", "HEAD column mixes indices and '_'" + where);
  if (static_cast<int>(predicates.size()) != apred_cols)
    throw SrlError("DanglingApred", std::to_string(predicates.size()) + " predicates but " +
                                        std::to_string(apred_cols) + " APRED columns" + where);

  std::vector<Tuple> tuples;
  for (int t = 0; t < n; ++t) {
    for (int k = 0; k < apred_cols; ++k) {
      const std::string& cell = rows[t][5 + k];
      if (cell == "_") continue;
      tuples.push_back({predicates[k], {t + 1, t + 1}, cell});
    }
  }
  std::optional<std::vector<int>> gold_heads;
  if (any_head) gold_heads = std::move(heads);
  return make_sentence(std::move(tokens), std::move(tuples), Style::Dep,
                       std::move(gold_heads), std::move(predicates));
}

}  // namespace

std::vector<Sentence> parse_conll(std::string_view text) {
  std::vector<Sentence> out;
  std::vector<std::vector<std::string>> rows;
  int line_no = 0, block_start = 1;
  for (auto line : split_lines(text)) {
    ++line_no;
    if (is_blank(line)) {
      if (!rows.empty()) out.push_back(conll_block(rows, block_start));
      rows.clear();
      continue;
    }
    if (rows.empty()) block_start = line_no;
    rows.push_back(split(line, '\t'));
  }
  if (!rows.empty()) out.push_back(conll_block(rows, block_start));
  return out;
}

std::string emit_conll(const std::vector<Sentence>& sentences) {
  std::ostringstream out;
  for (const auto& s : sentences) {
    const int n = s.size();
    const int k = static_cast<int>(s.predicates.size());
    std::vector<std::vector<std::string>> apred(n, std::vector<std::string>(k, "_"));
    for (const auto& t : s.gold_tuples) {
      if (t.argument.start != t.argument.end)
        throw SrlError("SpanInColumnFormat",
                       "column format only carries single-token arguments");
      auto col = std::lower_bound(s.predicates.begin(), s.predicates.end(), t.predicate) -
                 s.predicates.begin();
      apred[t.argument.start - 1][col] = t.role;
    }
    for (int t = 0; t < n; ++t) {
      bool is_pred = std::binary_search(s.predicates.begin(), s.predicates.end(), t + 1);
      out << (t + 1) << '\t' << s.tokens[t] << '\t'
          << (s.gold_heads ? std::to_string((*s.gold_heads)[t]) : std::string("_")) << '\t'
          << (is_pred ? "Y" : "_") << '\t' << (is_pred ? s.tokens[t] : std::string("_"));
      for (const auto& cell : apred[t]) out << '\t' << cell;
      out << '\n';
    }
    out << '\n';
  }
  return out.str();
}

namespace {

Sentence sentence_from_json(const json& rec) {
  if (!rec.is_object()) throw SrlError("MalformedRecord", "record is not an object");
  if (!rec.contains("tokens") || !rec["tokens"].is_array() || rec["tokens"].empty())
    throw SrlError("MalformedRecord", "missing or empty \"tokens\"");
  if (!rec.contains("mode") || !rec["mode"].is_string())
    throw SrlError("MalformedRecord", "missing \"mode\"");
  Style mode;
  try {
    mode = parse_style(rec["mode"].get<std::string>());
  } catch (const SrlError& e) {
    throw SrlError("MalformedRecord", e.what());
  }

  std::vector<std::string> tokens;
  for (const auto& tok : rec["tokens"]) {
    if (!tok.is_string()) throw SrlError("MalformedRecord", "token is not a string");
    tokens.push_back(tok.get<std::string>());
  }
  const int n = static_cast<int>(tokens.size());

  auto int_list = [&](const char* key) {
    std::vector<int> out;
    if (!rec.contains(key)) return out;
    if (!rec[key].is_array()) throw SrlError("MalformedRecord", std::string(key) + " not a list");
    for (const auto& v : rec[key]) {
      if (!v.is_number_integer()) throw SrlError("MalformedRecord", std::string(key) + " entry");
      out.push_back(v.get<int>());
    }
    return out;
  };

  std::optional<std::vector<int>> heads;
  if (rec.contains("heads") && !rec["heads"].is_null()) {
    heads = int_list("heads");
    if (static_cast<int>(heads->size()) != n)
      throw SrlError("MalformedRecord", "heads length differs from tokens");
    for (int h : *heads)
      if (h < 0 || h > n) throw SrlError("IndexOutOfRange", "head out of range");
  }
  std::vector<int> predicates = int_list("predicates");
  std::vector<int> nominal = int_list("nominal");
  for (int p : predicates)
    if (p < 1 || p > n) throw SrlError("IndexOutOfRange", "predicate out of range");
  for (int p : nominal)
    if (p < 1 || p > n) throw SrlError("IndexOutOfRange", "predicate out of range");

  std::vector<Tuple> tuples;
  if (rec.contains("tuples")) {
    if (!rec["tuples"].is_array()) throw SrlError("MalformedRecord", "tuples not a list");
    for (const auto& t : rec["tuples"]) {
      if (!t.is_array() || t.size() != 4 || !t[0].is_number_integer() ||
          !t[1].is_number_integer() || !t[2].is_number_integer() || !t[3].is_string())
        throw SrlError("MalformedRecord", "tuple must be [p, i, j, \"role\"]");
      Tuple tup{t[0].get<int>(), {t[1].get<int>(), t[2].get<int>()}, t[3].get<std::string>()};
      if (tup.predicate < 1 || tup.predicate > n || tup.argument.start < 1 ||
          tup.argument.end > n || tup.argument.start > tup.argument.end)
        throw SrlError("IndexOutOfRange", "tuple indices outside 1.." + std::to_string(n));
      if (tup.role == kNullRole)
        throw SrlError("EpsilonRoleInGold", "gold tuple carries the null label");
      tuples.push_back(std::move(tup));
    }
  }
  return make_sentence(std::move(tokens), std::move(tuples), mode, std::move(heads),
                       std::move(predicates), std::move(nominal));
}

json sentence_to_json(const Sentence& s) {
  json rec;
  rec["tokens"] = s.tokens;
  if (s.gold_heads) rec["heads"] = *s.gold_heads;
  rec["predicates"] = s.predicates;
  json tuples = json::array();
  for (const auto& t : s.gold_tuples)
    tuples.push_back(json::array({t.predicate, t.argument.start, t.argument.end, t.role}));
  rec["tuples"] = std::move(tuples);
  if (!s.nominal_predicates.empty()) rec["nominal"] = s.nominal_predicates;
  rec["mode"] = to_string(s.mode);
  return rec;
}

}  // namespace

std::vector<Sentence> parse_jsonl(std::string_view text) {
  std::vector<Sentence> out;
  int line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    if (is_blank(line)) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw SrlError("MalformedRecord", "line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      out.push_back(sentence_from_json(rec));
    } catch (const SrlError& e) {
      throw SrlError(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string emit_jsonl_line(const Sentence& sentence) {
  return sentence_to_json(sentence).dump();
}

std::string emit_jsonl(const std::vector<Sentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    out += emit_jsonl_line(s);
    out += '\n';
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SrlError("UnreadableFile", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SrlError("UnwritableFile", "cannot open " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

std::vector<Sentence> load_corpus(const std::filesystem::path& path) {
  std::string text = read_file(path);
  auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".json") return parse_jsonl(text);
  return parse_conll(text);
}

// ---------------------------------------------------------------------------

Vocabulary::Vocabulary() {
  add_word("<pad>", 0);
  add_word("<unk>", 0);
  add_char("<pad>");
  add_char("<unk>");
}

int Vocabulary::add_word(const std::string& word, std::int64_t count) {
  if (auto it = word_index_.find(word); it != word_index_.end()) {
    freq_[it->second] += count;
    return it->second;
  }
  int idx = word_count();
  words_.push_back(word);
  freq_.push_back(count);
  word_index_.emplace(word, idx);
  return idx;
}

int Vocabulary::add_char(const std::string& ch) {
  if (auto it = char_index_.find(ch); it != char_index_.end()) return it->second;
  int idx = char_count();
  chars_.push_back(ch);
  char_index_.emplace(ch, idx);
  return idx;
}

int Vocabulary::word_index(const std::string& word) const {
  if (auto it = word_index_.find(word); it != word_index_.end()) return it->second;
  if (auto it = word_index_.find(lowercase(word)); it != word_index_.end()) return it->second;
  return kUnk;
}

int Vocabulary::char_index(const std::string& ch) const {
  if (auto it = char_index_.find(ch); it != char_index_.end()) return it->second;
  return kUnk;
}

std::int64_t Vocabulary::frequency(const std::string& word) const {
  if (auto it = word_index_.find(word); it != word_index_.end()) return freq_[it->second];
  return 0;
}

std::string Vocabulary::to_json() const {
  json out;
  out["version"] = 1;
  out["words"] = words_;
  out["freq"] = freq_;
  out["chars"] = chars_;
  out["roles"] = roles_.labels();
  return out.dump();
}

Vocabulary Vocabulary::from_json(std::string_view text) {
  json in;
  try {
    in = json::parse(text);
  } catch (const json::exception& e) {
    throw SrlError("MalformedVocabulary", e.what());
  }
  if (in.value("version", 0) != 1)
    throw SrlError("MalformedVocabulary", "unsupported vocabulary version");
  Vocabulary v;
  v.words_.clear();
  v.word_index_.clear();
  v.freq_.clear();
  v.chars_.clear();
  v.char_index_.clear();
  auto words = in.at("words").get<std::vector<std::string>>();
  auto freq = in.at("freq").get<std::vector<std::int64_t>>();
  if (words.size() != freq.size() || words.size() < 2)
    throw SrlError("MalformedVocabulary", "word table inconsistent");
  for (std::size_t i = 0; i < words.size(); ++i) v.add_word(words[i], freq[i]);
  for (const auto& c : in.at("chars").get<std::vector<std::string>>()) v.add_char(c);
  v.roles_ = RoleInventory(in.at("roles").get<std::vector<std::string>>());
  return v;
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : to_json()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

bool Vocabulary::operator==(const Vocabulary& other) const {
  return words_ == other.words_ && freq_ == other.freq_ && chars_ == other.chars_ &&
         roles_ == other.roles_;
}

Vocabulary build_vocab(const std::vector<Sentence>& corpus, int min_freq) {
  if (corpus.empty()) throw SrlError("EmptyCorpus", "cannot build a vocabulary from nothing");
  std::vector<std::string> order;
  std::unordered_map<std::string, std::int64_t> counts;
  Vocabulary vocab;
  for (const auto& s : corpus) {
    for (const auto& tok : s.tokens) {
      if (counts[tok]++ == 0) order.push_back(tok);
    }
    for (const auto& chars : s.char_seqs)
      for (const auto& c : chars) vocab.add_char(c);
    for (const auto& t : s.gold_tuples) vocab.roles().add(t.role);
  }
  for (const auto& w : order)
    if (counts[w] >= min_freq) vocab.add_word(w, counts[w]);
  return vocab;
}

EmbeddingMatrix random_embeddings(const Vocabulary& vocab, int dim, std::mt19937_64& rng) {
  const double bound = std::sqrt(3.0 / dim);
  std::uniform_real_distribution<double> uni(-bound, bound);
  EmbeddingMatrix out;
  out.rows = Matrix::Zero(vocab.word_count(), dim);
  for (int r = 1; r < vocab.word_count(); ++r)
    for (int c = 0; c < dim; ++c) out.rows(r, c) = uni(rng);
  out.source = EmbeddingSource::Random;
  return out;
}

EmbeddingMatrix parse_pretrained(std::string_view text, const Vocabulary& vocab,
                                 std::mt19937_64& rng) {
  std::unordered_map<std::string, std::vector<double>> table;
  int dim = -1;
  int line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    if (is_blank(line)) continue;
    std::istringstream fields{std::string(line)};
    std::string word;
    fields >> word;
    std::vector<double> values;
    double v;
    while (fields >> v) values.push_back(v);
    if (!fields.eof())
      throw SrlError("UnreadableFile", "non-numeric value on line " + std::to_string(line_no));
    if (dim < 0) dim = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != dim || dim == 0)
      throw SrlError("DimensionDrift", "line " + std::to_string(line_no) + " has dimension " +
                                           std::to_string(values.size()) + ", expected " +
                                           std::to_string(dim));
    table.emplace(std::move(word), std::move(values));
  }
  if (dim <= 0) throw SrlError("UnreadableFile", "embedding file holds no vectors");

  std::uniform_real_distribution<double> uni(-0.01, 0.01);
  EmbeddingMatrix out;
  out.rows = Matrix::Zero(vocab.word_count(), dim);
  out.source = EmbeddingSource::Pretrained;
  for (int r = 1; r < vocab.word_count(); ++r) {
    const std::string& w = vocab.words()[r];
    auto it = table.find(w);
    if (it == table.end()) it = table.find(lowercase(w));
    if (r != Vocabulary::kUnk && it != table.end()) {
      for (int c = 0; c < dim; ++c) out.rows(r, c) = it->second[c];
    } else {
      for (int c = 0; c < dim; ++c) out.rows(r, c) = uni(rng);
    }
  }
  return out;
}

EmbeddingMatrix load_pretrained(const std::filesystem::path& path, const Vocabulary& vocab,
                                std::mt19937_64& rng) {
  return parse_pretrained(read_file(path), vocab, rng);
}

ExternalEmbeddings ExternalEmbeddings::parse(std::string_view text) {
  ExternalEmbeddings out;
  int line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    if (is_blank(line)) continue;
    const std::string where = "line " + std::to_string(line_no);
    json rec;
    try {
      rec = json::parse(line);
      int ordinal = rec.at("sentence").get<int>();
      auto rows = rec.at("vectors").get<std::vector<std::vector<double>>>();
      if (rows.empty()) throw SrlError("MalformedRecord", where + ": no vectors");
      int d = static_cast<int>(rows.front().size());
      if (out.dim_ == 0) out.dim_ = d;
      Matrix m(static_cast<int>(rows.size()), d);
      for (std::size_t t = 0; t < rows.size(); ++t) {
        if (static_cast<int>(rows[t].size()) != out.dim_)
          throw SrlError("DimensionDrift", where + ": vector width differs");
        for (int c = 0; c < d; ++c) m(static_cast<int>(t), c) = rows[t][c];
      }
      if (!out.vectors_.emplace(ordinal, std::move(m)).second)
        throw SrlError("MalformedRecord", where + ": duplicate sentence ordinal");
    } catch (const json::exception& e) {
      throw SrlError("MalformedRecord", where + ": " + e.what());
    }
  }
  return out;
}

ExternalEmbeddings ExternalEmbeddings::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

const Matrix& ExternalEmbeddings::at(int ordinal, int tokens) const {
  auto it = vectors_.find(ordinal);
  if (it == vectors_.end())
    throw SrlError("MissingExternal", "no external vectors for sentence " + std::to_string(ordinal));
  if (it->second.rows() != tokens)
    throw SrlError("TokenCountMismatch", "sentence " + std::to_string(ordinal) + " has " +
                                             std::to_string(tokens) + " tokens but " +
                                             std::to_string(it->second.rows()) + " vectors");
  return it->second;
}

}  // namespace srl
