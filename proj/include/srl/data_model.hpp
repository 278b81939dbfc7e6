#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace srl {

// Thrown by every module; `code` is a stable identifier (e.g. "DanglingApred").
class SrlError : public std::runtime_error {
 public:
  SrlError(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

enum class Style { Span, Dep };

std::string to_string(Style style);
Style parse_style(const std::string& text);

// Whether predicates are detected by the model or supplied from the corpus.
enum class PredicateMode { EndToEnd, PreIdentified };

std::string to_string(PredicateMode mode);
PredicateMode parse_predicate_mode(const std::string& text);

// Inclusive, 1-based token range. Dependency arguments have start == end.
struct SpanRef {
  int start = 1;
  int end = 1;

  int width() const { return end - start + 1; }
  bool contains(int token) const { return start <= token && token <= end; }
  bool overlaps(const SpanRef& other) const {
    return start <= other.end && other.start <= end;
  }

  auto operator<=>(const SpanRef&) const = default;
};

// A labeled predicate-argument relation. The null label is never stored.
struct Tuple {
  int predicate = 1;
  SpanRef argument;
  std::string role;

  auto operator<=>(const Tuple&) const = default;
};

inline constexpr const char* kNullRole = "ε";

// Role labels with the null label pinned at index 0.
class RoleInventory {
 public:
  RoleInventory();
  explicit RoleInventory(const std::vector<std::string>& roles);

  // Appends `role` if unseen and returns its index. Rejects the null label.
  int add(const std::string& role);

  std::optional<int> find(const std::string& role) const;
  int index(const std::string& role) const;  // throws UnknownRole
  const std::string& label(int index) const { return labels_.at(index); }
  const std::vector<std::string>& labels() const { return labels_; }
  int size() const { return static_cast<int>(labels_.size()); }

  bool is_core(int index) const { return core_.at(index); }
  // Indices of core roles in label order.
  std::vector<int> core_indices() const;

  bool operator==(const RoleInventory& other) const {
    return labels_ == other.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<bool> core_;
  std::unordered_map<std::string, int> index_;
};

// A0-A5 and AA, also accepted in the ARG0-ARG5/ARGA spelling.
bool is_core_role(const std::string& role);

// "C-A1" -> "A1", "R-AM-LOC" -> "AM-LOC", anything else -> nullopt.
std::optional<std::string> continuation_base(const std::string& role);
std::optional<std::string> reference_base(const std::string& role);

struct Sentence {
  std::vector<std::string> tokens;
  std::vector<std::vector<std::string>> char_seqs;
  std::optional<std::vector<int>> gold_heads;  // 0 = root
  std::vector<int> predicates;                 // sorted, unique
  std::vector<Tuple> gold_tuples;              // sorted, unique (p, a)
  std::vector<int> nominal_predicates;         // sorted, unique
  Style mode = Style::Span;

  int size() const { return static_cast<int>(tokens.size()); }

  bool operator==(const Sentence&) const = default;
};

// Builds a validated sentence: derives characters, sorts tuples, adds the
// predicates of every tuple to `predicates`.
Sentence make_sentence(std::vector<std::string> tokens,
                       std::vector<Tuple> tuples, Style mode,
                       std::optional<std::vector<int>> heads = std::nullopt,
                       std::vector<int> predicates = {},
                       std::vector<int> nominal_predicates = {});

// Throws BadIndex / DuplicatePair / EpsilonRoleInGold / DepSpanArgument.
void validate(const Sentence& sentence);

// Splits a UTF-8 string into code points.
std::vector<std::string> utf8_chars(const std::string& word);

struct ConstraintFlags {
  bool unique_core = false;
  bool continuation = false;
  bool reference = false;
  bool non_overlap = false;

  bool any() const {
    return unique_core || continuation || reference || non_overlap;
  }
  bool operator==(const ConstraintFlags&) const = default;
};

class SrlGraph {
 public:
  SrlGraph() = default;
  // Sorts the tuples; throws DuplicatePair when two share (p, a).
  explicit SrlGraph(std::vector<Tuple> tuples,
                    ConstraintFlags constraints = {});

  const std::vector<Tuple>& tuples() const { return tuples_; }
  std::vector<int> predicates() const;
  const ConstraintFlags& constraints() const { return constraints_; }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }

  bool operator==(const SrlGraph& other) const {
    return tuples_ == other.tuples_;
  }

 private:
  std::vector<Tuple> tuples_;
  ConstraintFlags constraints_;
};

inline SrlGraph gold_graph(const Sentence& sentence) {
  return SrlGraph(sentence.gold_tuples);
}

// Every (i, j) with j - i + 1 <= max_len, lexicographic.
std::vector<SpanRef> enumerate_arguments(int n, int max_len);
std::vector<int> enumerate_predicates(int n);

}  // namespace srl
