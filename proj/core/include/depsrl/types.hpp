#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace depsrl {

// Token positions are 1-based throughout the library; position 0 is the
// virtual root and never appears as a Token.

struct Token {
  int index = 0;
  std::string form;
  std::optional<std::string> pos;

  bool operator==(const Token&) const = default;
};

// Inclusive token range [start, end].
struct Span {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  bool contains(int i) const { return start <= i && i <= end; }

  bool operator==(const Span&) const = default;
  auto operator<=>(const Span&) const = default;
};

struct Argument {
  std::string label;
  Span span;

  bool operator==(const Argument&) const = default;
  auto operator<=>(const Argument&) const = default;
};

struct SrlFrame {
  int predicate = 0;
  std::vector<Argument> arguments;

  bool operator==(const SrlFrame&) const = default;
};

/// Sorts arguments by (span, label) and removes exact duplicates.
void canonicalize(SrlFrame& frame);
/// Canonicalizes every frame and orders frames by predicate index.
void canonicalize(std::vector<SrlFrame>& frames);

class TreeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntactic dependency tree over tokens 1..n. Storage is 0-based
// (heads[k] is the governor of token k + 1) but every accessor takes
// 1-based token positions.
struct DepTree {
  std::vector<int> heads;
  std::vector<std::string> rels;

  int size() const { return static_cast<int>(heads.size()); }
  int head(int i) const { return heads[static_cast<std::size_t>(i - 1)]; }
  const std::string& rel(int i) const { return rels[static_cast<std::size_t>(i - 1)]; }

  bool operator==(const DepTree&) const = default;
};

/// Throws TreeError unless every token reaches the root without cycles,
/// heads are in [0, n] and no token heads itself.
void validate_tree(const std::vector<int>& heads);
void validate_tree(const DepTree& tree);
bool is_valid_tree(const std::vector<int>& heads);

/// Throws TreeError when spans leave the sentence, overlap the predicate,
/// or repeat an identical (label, span) pair within a frame.
void validate_frame(const SrlFrame& frame, int sentence_length);

// (C) tuple: the parent predicate's argument labelled `parent` is the
// child predicate's argument labelled `child`. An empty `parent` is the
// NULL-marker referencing the dummy relation.
struct CShare {
  std::optional<std::string> parent;
  std::string child;
  bool propagate_argm = false;

  bool operator==(const CShare&) const = default;
};

struct JointLabel {
  std::string syn;
  std::optional<std::string> d;
  std::optional<CShare> c;
  std::optional<std::string> r;

  bool has_srl() const { return d || c || r; }
  bool operator==(const JointLabel&) const = default;
};

struct JointTree {
  std::vector<int> heads;
  std::vector<JointLabel> labels;

  int size() const { return static_cast<int>(heads.size()); }
  int head(int i) const { return heads[static_cast<std::size_t>(i - 1)]; }
  const JointLabel& label(int i) const { return labels[static_cast<std::size_t>(i - 1)]; }
  JointLabel& label(int i) { return labels[static_cast<std::size_t>(i - 1)]; }

  /// Drops every SRL slot, returning the underlying syntactic tree.
  DepTree syntax() const;

  bool operator==(const JointTree&) const = default;
};

enum class PatternClass { D, C, R, Other };

const char* to_string(PatternClass p);

struct AnnotatedSentence {
  std::vector<std::string> comments;  // raw '#' lines other than the predicate header
  std::vector<Token> tokens;
  DepTree tree;
  std::vector<SrlFrame> frames;  // one per predicate, ascending predicate index

  int size() const { return static_cast<int>(tokens.size()); }
  std::vector<int> predicates() const;

  bool operator==(const AnnotatedSentence&) const = default;
};

struct JointSentence {
  std::vector<std::string> comments;
  std::vector<Token> tokens;
  JointTree tree;
  std::vector<int> predicates;  // ascending

  int size() const { return static_cast<int>(tokens.size()); }

  bool operator==(const JointSentence&) const = default;
};

// Reserved label for the dummy relation that anchors (C) tuples whose
// common governor does not itself take the shared argument. Never
// appears in decoded frames.
inline constexpr const char* kNullArgLabel = "NULL-ARG";

bool is_modifier_label(const std::string& label);  // ARGM-*

}  // namespace depsrl
