#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "depsrl/types.hpp"

namespace depsrl {

struct PrfScore {
  double precision = 0.0;  // percentages in [0, 100]
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t matched = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;

  static PrfScore from_counts(std::size_t matched, std::size_t predicted, std::size_t gold);
};

/// Micro-averaged span-exact scoring: a predicted argument matches when
/// sentence, predicate, label and span boundaries all agree. Duplicate
/// predictions count once. Outer vectors are indexed by sentence.
PrfScore srl_prf(const std::vector<std::vector<SrlFrame>>& gold,
                 const std::vector<std::vector<SrlFrame>>& predicted);

std::map<std::string, PrfScore> per_label_report(const std::vector<std::vector<SrlFrame>>& gold,
                                                 const std::vector<std::vector<SrlFrame>>& predicted);

/// Structural route of a relation: D, R and C as classified, with Other
/// relations reachable by chaining (C) tuples down from an ancestor of the
/// predicate reported as C.
PatternClass route_pattern(const std::vector<int>& heads, int pred, int arg_head);

/// Gold relations are bucketed by their route in the gold tree, predicted
/// ones by their route in the tree they were decoded from. A match counts
/// toward its gold bucket, so bucket counts partition the overall counts.
std::map<PatternClass, PrfScore> per_pattern_report(const std::vector<AnnotatedSentence>& gold,
                                                    const std::vector<AnnotatedSentence>& predicted);

struct AttachmentScore {
  double uas = 0.0;
  double las = 0.0;
  std::size_t correct_heads = 0;
  std::size_t correct_labeled = 0;
  std::size_t tokens = 0;

  static AttachmentScore from_counts(std::size_t heads, std::size_t labeled, std::size_t tokens);
};

/// Throws std::invalid_argument on a length mismatch.
AttachmentScore attachment_scores(const DepTree& gold, const DepTree& predicted);
AttachmentScore attachment_scores(const std::vector<DepTree>& gold, const std::vector<DepTree>& predicted);

enum class ReportFormat { text, kv };

ReportFormat parse_report_format(const std::string& name);

/// Appends a P/R/F block; kv lines look like `<prefix>.f1=83.00`.
void write_prf(std::string& out, ReportFormat fmt, const std::string& name, const PrfScore& s);

}  // namespace depsrl
