#include "srl/data_model.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace srl {

std::string to_string(Style style) {
  return style == Style::Span ? "SPAN" : "DEP";
}

Style parse_style(const std::string& text) {
  if (text == "SPAN" || text == "span") return Style::Span;
  if (text == "DEP" || text == "dep") return Style::Dep;
  throw SrlError("BadStyle", "expected SPAN or DEP, got '" + text + "'");
}

std::string to_string(PredicateMode mode) {
  return mode == PredicateMode::EndToEnd ? "end-to-end" : "pre-identified";
}

PredicateMode parse_predicate_mode(const std::string& text) {
  if (text == "end-to-end" || text == "e2e") return PredicateMode::EndToEnd;
  if (text == "pre-identified" || text == "gold") return PredicateMode::PreIdentified;
  throw SrlError("BadMode", "expected end-to-end or pre-identified, got '" + text + "'");
}

bool is_core_role(const std::string& role) {
  static const std::set<std::string> kCore = {
      "A0",   "A1",   "A2",   "A3",   "A4",   "A5",   "AA",
      "ARG0", "ARG1", "ARG2", "ARG3", "ARG4", "ARG5", "ARGA"};
  return kCore.count(role) > 0;
}

namespace {

std::optional<std::string> strip_prefix(const std::string& role,
                                        const std::string& prefix) {
  if (role.size() > prefix.size() && role.compare(0, prefix.size(), prefix) == 0)
    return role.substr(prefix.size());
  return std::nullopt;
}

}  // namespace

std::optional<std::string> continuation_base(const std::string& role) {
  return strip_prefix(role, "C-");
}

std::optional<std::string> reference_base(const std::string& role) {
  return strip_prefix(role, "R-");
}

RoleInventory::RoleInventory() {
  labels_.push_back(kNullRole);
  core_.push_back(false);
  index_.emplace(kNullRole, 0);
}

RoleInventory::RoleInventory(const std::vector<std::string>& roles)
    : RoleInventory() {
  for (const auto& role : roles) {
    if (role == kNullRole) continue;
    add(role);
  }
}

int RoleInventory::add(const std::string& role) {
  if (role == kNullRole)
    throw SrlError("EpsilonRoleInGold", "the null label is implicit");
  if (auto it = index_.find(role); it != index_.end()) return it->second;
  int idx = size();
  labels_.push_back(role);
  core_.push_back(is_core_role(role));
  index_.emplace(role, idx);
  return idx;
}

std::optional<int> RoleInventory::find(const std::string& role) const {
  if (auto it = index_.find(role); it != index_.end()) return it->second;
  return std::nullopt;
}

int RoleInventory::index(const std::string& role) const {
  if (auto found = find(role)) return *found;
  throw SrlError("UnknownRole", "role '" + role + "' not in inventory");
}

std::vector<int> RoleInventory::core_indices() const {
  std::vector<int> out;
  for (int r = 1; r < size(); ++r)
    if (core_[r]) out.push_back(r);
  return out;
}

std::vector<std::string> utf8_chars(const std::string& word) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < word.size()) {
    auto lead = static_cast<unsigned char>(word[i]);
    std::size_t len = 1;
    if (lead >= 0xF0) len = 4;
    else if (lead >= 0xE0) len = 3;
    else if (lead >= 0xC0) len = 2;
    len = std::min(len, word.size() - i);
    out.push_back(word.substr(i, len));
    i += len;
  }
  return out;
}

namespace {

void sort_unique(std::vector<int>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

void validate(const Sentence& s) {
  const int n = s.size();
  if (n < 1) throw SrlError("EmptySentence", "sentence has no tokens");
  if (s.gold_heads && static_cast<int>(s.gold_heads->size()) != n)
    throw SrlError("BadIndex", "head count differs from token count");
  if (s.gold_heads) {
    for (int h : *s.gold_heads)
      if (h < 0 || h > n) throw SrlError("BadIndex", "head out of range");
  }
  for (int p : s.predicates)
    if (p < 1 || p > n) throw SrlError("BadIndex", "predicate out of range");
  for (int p : s.nominal_predicates)
    if (p < 1 || p > n) throw SrlError("BadIndex", "predicate out of range");
  for (std::size_t k = 0; k < s.gold_tuples.size(); ++k) {
    const Tuple& t = s.gold_tuples[k];
    if (t.predicate < 1 || t.predicate > n || t.argument.start < 1 ||
        t.argument.start > t.argument.end || t.argument.end > n)
      throw SrlError("IndexOutOfRange", "tuple index outside sentence");
    if (t.role == kNullRole || t.role.empty())
      throw SrlError("EpsilonRoleInGold", "gold tuple carries the null label");
    if (s.mode == Style::Dep && t.argument.start != t.argument.end)
      throw SrlError("DepSpanArgument", "dependency argument spans tokens");
    if (k > 0 && s.gold_tuples[k - 1].predicate == t.predicate &&
        s.gold_tuples[k - 1].argument == t.argument)
      throw SrlError("DuplicatePair", "two roles for one (p, a) pair");
  }
}

Sentence make_sentence(std::vector<std::string> tokens,
                       std::vector<Tuple> tuples, Style mode,
                       std::optional<std::vector<int>> heads,
                       std::vector<int> predicates,
                       std::vector<int> nominal_predicates) {
  Sentence s;
  s.tokens = std::move(tokens);
  for (const auto& tok : s.tokens) s.char_seqs.push_back(utf8_chars(tok));
  s.gold_heads = std::move(heads);
  std::sort(tuples.begin(), tuples.end());
  s.gold_tuples = std::move(tuples);
  for (const auto& t : s.gold_tuples) predicates.push_back(t.predicate);
  sort_unique(predicates);
  s.predicates = std::move(predicates);
  sort_unique(nominal_predicates);
  s.nominal_predicates = std::move(nominal_predicates);
  s.mode = mode;
  validate(s);
  return s;
}

SrlGraph::SrlGraph(std::vector<Tuple> tuples, ConstraintFlags constraints)
    : tuples_(std::move(tuples)), constraints_(constraints) {
  std::sort(tuples_.begin(), tuples_.end());
  for (std::size_t k = 1; k < tuples_.size(); ++k) {
    if (tuples_[k - 1].predicate == tuples_[k].predicate &&
        tuples_[k - 1].argument == tuples_[k].argument)
      throw SrlError("DuplicatePair", "two roles for one (p, a) pair");
  }
}

std::vector<int> SrlGraph::predicates() const {
  std::vector<int> out;
  for (const auto& t : tuples_) out.push_back(t.predicate);
  sort_unique(out);
  return out;
}

std::vector<SpanRef> enumerate_arguments(int n, int max_len) {
  if (n < 1) throw SrlError("EmptySentence", "n must be >= 1");
  if (max_len < 1) throw SrlError("BadMaxLength", "max_len must be >= 1");
  std::vector<SpanRef> out;
  for (int i = 1; i <= n; ++i)
    for (int j = i; j <= n && j - i + 1 <= max_len; ++j) out.push_back({i, j});
  return out;
}

std::vector<int> enumerate_predicates(int n) {
  if (n < 1) throw SrlError("EmptySentence", "n must be >= 1");
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) out[i] = i + 1;
  return out;
}

}  // namespace srl
