#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "depsrl/convert.hpp"
#include "depsrl/eval.hpp"
#include "depsrl/types.hpp"

namespace depsrl {

// Corpus-level structural statistics. The two-hop bucket holds relations
// where the argument is a sibling of the predicate's governor (a (C)+(C)
// chain through control and coordination); it is carved out of Other and
// reported next to R, the way the pattern table lays it out.
enum class StructureBucket { D, C, R, TwoHop, Other };

inline constexpr std::array<StructureBucket, 5> kAllBuckets = {
    StructureBucket::D, StructureBucket::C, StructureBucket::R, StructureBucket::TwoHop,
    StructureBucket::Other};

const char* to_string(StructureBucket b);

StructureBucket structure_bucket(const DepTree& tree, int pred, int arg_head);

struct PatternDistribution {
  std::array<std::size_t, 5> counts{};
  std::size_t total = 0;
  // Syntactic relation on the edge that realizes the pattern (the argument
  // head's relation for D/Other, the predicate's relation otherwise).
  std::array<std::map<std::string, std::size_t>, 5> relation_labels;

  std::size_t count(StructureBucket b) const { return counts[static_cast<std::size_t>(b)]; }
  double fraction(StructureBucket b) const;
  std::vector<std::pair<std::string, double>> top_relations(StructureBucket b, std::size_t k) const;

  void merge(const PatternDistribution& other);
};

PatternDistribution pattern_stats(const AnnotatedSentence& sentence);
PatternDistribution pattern_stats(const std::vector<AnnotatedSentence>& corpus);

struct OracleResult {
  PrfScore score;
  ConversionReport report;  // relations of all sentences, in corpus order
  std::size_t sentences = 0;
  std::size_t ignored_c_labels = 0;
};

/// Encodes every sentence, decodes it back and scores against the input.
OracleResult oracle_roundtrip(const std::vector<AnnotatedSentence>& corpus,
                              const EncodeOptions& options = {});

std::string format_distribution(const PatternDistribution& dist, ReportFormat fmt, std::size_t top_k = 5);
std::string format_oracle(const OracleResult& result, ReportFormat fmt);

}  // namespace depsrl
