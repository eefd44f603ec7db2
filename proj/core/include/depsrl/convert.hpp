#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "depsrl/types.hpp"

namespace depsrl {

// Forward conversion packs SRL frames into joint labels on an unchanged
// dependency tree; backward conversion recovers frames from the labels.
//
// Forward:
//   1. every argument span is reduced to its syntactic head;
//   2. (D) and (R) relations fill the direct slots of the connecting edge;
//   3. a preorder pass gives each predicate one (C) tuple against its
//      governor, choosing among shareable arguments, plus an ARGM flag
//      when the predicate takes every ARGM argument of its governor.
// Backward mirrors this: direct slots first, then (C) tuples top-down,
// then span reconstruction.

class ConversionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ArgumentHead {
  int index = 0;
  bool ambiguous = false;
};

/// Token inside `span` governed from outside it. With several such tokens
/// the one dominating most of the span wins, leftmost on ties, and the
/// result is flagged ambiguous. Throws ConversionError on an empty span.
ArgumentHead argument_head(const DepTree& tree, Span span);

PatternClass classify_pattern(const DepTree& tree, int pred, int arg_head);
PatternClass classify_pattern(const std::vector<int>& heads, int pred, int arg_head);

enum class Language { en, zh };

Language parse_language(const std::string& tag);
const char* to_string(Language lang);

struct ReconstructedSpan {
  Span span;
  bool contiguous = true;
};

// Span heuristics for (R) arguments, selected per language.
struct SpanRules {
  ReconstructedSpan (*reverse_left)(const std::vector<int>& heads, int pred, int arg_head);
  ReconstructedSpan (*reverse_right)(const std::vector<int>& heads, int pred, int arg_head);
};

/// Only English heuristics exist; other languages fall back to them.
const SpanRules& span_rules(Language lang);

/// D: subtree of the argument head. R: argument head plus its child
/// subtrees left of (or right of) the predicate. C: the shared span.
ReconstructedSpan reconstruct_span(const std::vector<int>& heads, PatternClass pattern, int pred,
                                   int arg_head, std::optional<Span> shared = std::nullopt,
                                   const SpanRules& rules = span_rules(Language::en));

enum class ConversionReason {
  ok,
  other_pattern,       // no (D)/(R)/(C) route reaches the argument
  multi_core_dropped,  // shareable, but another argument took the (C) tuple
  head_ambiguous,      // converted, but the span has several external heads
  slot_collision,      // the required slot or dummy relation was already used
};

const char* to_string(ConversionReason r);

struct RelationRecord {
  int predicate = 0;
  Argument argument;
  int arg_head = 0;
  PatternClass pattern = PatternClass::Other;  // structural configuration
  std::optional<PatternClass> route;           // slot kind carrying it, if converted
  ConversionReason reason = ConversionReason::ok;
  bool recovered = false;  // backward conversion reproduces it exactly

  bool converted() const { return route.has_value(); }
};

struct ConversionReport {
  std::vector<RelationRecord> relations;

  std::size_t total() const { return relations.size(); }
  std::size_t converted() const;
  std::size_t recovered() const;
  std::size_t count(ConversionReason reason) const;
};

struct EncodeOptions {
  // When set, multiple shareable core arguments are resolved by a seeded
  // random draw instead of the smallest label.
  std::optional<std::uint64_t> share_seed;
  Language language = Language::en;
};

struct EncodeResult {
  JointTree tree;
  ConversionReport report;
};

EncodeResult encode_joint(const DepTree& tree, const std::vector<SrlFrame>& frames,
                          const EncodeOptions& options = {});

struct DecodeOptions {
  Language language = Language::en;
};

struct DecodeResult {
  std::vector<SrlFrame> frames;                    // canonical, one per predicate
  std::vector<std::vector<PatternClass>> routes;   // parallel to frames[i].arguments
  int ignored_c_labels = 0;                        // tuples naming a missing argument
  int noncontiguous_spans = 0;
};

DecodeResult decode_joint_detailed(const JointTree& tree, const std::vector<int>& predicates,
                                   const DecodeOptions& options = {});

std::vector<SrlFrame> decode_joint(const JointTree& tree, const std::vector<int>& predicates,
                                   const DecodeOptions& options = {});

}  // namespace depsrl
