#include "depsrl/analyze.hpp"

#include <algorithm>
#include <cstdio>

namespace depsrl {

const char* to_string(StructureBucket b) {
  switch (b) {
    case StructureBucket::D: return "D";
    case StructureBucket::C: return "C";
    case StructureBucket::R: return "R";
    case StructureBucket::TwoHop: return "C+C";
    case StructureBucket::Other: return "Other";
  }
  return "?";
}

StructureBucket structure_bucket(const DepTree& tree, int pred, int arg_head) {
  switch (classify_pattern(tree, pred, arg_head)) {
    case PatternClass::D: return StructureBucket::D;
    case PatternClass::C: return StructureBucket::C;
    case PatternClass::R: return StructureBucket::R;
    case PatternClass::Other: break;
  }
  const int gov = tree.head(pred);
  const int arg_gov = tree.head(arg_head);
  if (gov != 0 && arg_gov != 0 && tree.head(gov) == arg_gov) return StructureBucket::TwoHop;
  return StructureBucket::Other;
}

double PatternDistribution::fraction(StructureBucket b) const {
  return total == 0 ? 0.0 : static_cast<double>(count(b)) / static_cast<double>(total);
}

std::vector<std::pair<std::string, double>> PatternDistribution::top_relations(StructureBucket b,
                                                                               std::size_t k) const {
  const auto& labels = relation_labels[static_cast<std::size_t>(b)];
  std::vector<std::pair<std::string, std::size_t>> sorted(labels.begin(), labels.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  std::vector<std::pair<std::string, double>> out;
  const double denom = static_cast<double>(std::max<std::size_t>(count(b), 1));
  for (std::size_t i = 0; i < sorted.size() && i < k; ++i)
    out.emplace_back(sorted[i].first, static_cast<double>(sorted[i].second) / denom);
  return out;
}

void PatternDistribution::merge(const PatternDistribution& other) {
  total += other.total;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    counts[b] += other.counts[b];
    for (const auto& [label, c] : other.relation_labels[b]) relation_labels[b][label] += c;
  }
}

PatternDistribution pattern_stats(const AnnotatedSentence& sentence) {
  PatternDistribution dist;
  const auto& tree = sentence.tree;
  for (const auto& frame : sentence.frames) {
    for (const auto& arg : frame.arguments) {
      const int head = argument_head(tree, arg.span).index;
      const auto b = structure_bucket(tree, frame.predicate, head);
      const auto idx = static_cast<std::size_t>(b);
      ++dist.counts[idx];
      ++dist.total;
      const bool on_arg = b == StructureBucket::D || b == StructureBucket::Other;
      ++dist.relation_labels[idx][tree.rel(on_arg ? head : frame.predicate)];
    }
  }
  return dist;
}

PatternDistribution pattern_stats(const std::vector<AnnotatedSentence>& corpus) {
  PatternDistribution dist;
  for (const auto& s : corpus) dist.merge(pattern_stats(s));
  return dist;
}

OracleResult oracle_roundtrip(const std::vector<AnnotatedSentence>& corpus, const EncodeOptions& options) {
  OracleResult result;
  std::vector<std::vector<SrlFrame>> gold, decoded;
  gold.reserve(corpus.size());
  decoded.reserve(corpus.size());
  for (const auto& s : corpus) {
    auto enc = encode_joint(s.tree, s.frames, options);
    auto dec = decode_joint_detailed(enc.tree, s.predicates(), {options.language});
    result.ignored_c_labels += static_cast<std::size_t>(dec.ignored_c_labels);
    gold.push_back(s.frames);
    decoded.push_back(std::move(dec.frames));
    auto& rel = result.report.relations;
    rel.insert(rel.end(), std::make_move_iterator(enc.report.relations.begin()),
               std::make_move_iterator(enc.report.relations.end()));
  }
  result.sentences = corpus.size();
  result.score = srl_prf(gold, decoded);
  return result;
}

std::string format_distribution(const PatternDistribution& dist, ReportFormat fmt, std::size_t top_k) {
  std::string out;
  char buf[256];
  if (fmt == ReportFormat::kv) {
    std::snprintf(buf, sizeof buf, "relations.total=%zu\n", dist.total);
    out += buf;
    for (auto b : kAllBuckets) {
      std::snprintf(buf, sizeof buf, "pattern.%s.count=%zu\npattern.%s.percent=%.4f\n", to_string(b),
                    dist.count(b), to_string(b), 100.0 * dist.fraction(b));
      out += buf;
      for (const auto& [label, frac] : dist.top_relations(b, top_k)) {
        std::snprintf(buf, sizeof buf, "pattern.%s.rel.%s=%.4f\n", to_string(b), label.c_str(), 100.0 * frac);
        out += buf;
      }
    }
    return out;
  }
  std::snprintf(buf, sizeof buf, "%-8s %10s %9s   top relations\n", "pattern", "count", "percent");
  out += buf;
  for (auto b : kAllBuckets) {
    std::snprintf(buf, sizeof buf, "%-8s %10zu %8.2f%%  ", to_string(b), dist.count(b), 100.0 * dist.fraction(b));
    out += buf;
    for (const auto& [label, frac] : dist.top_relations(b, top_k)) {
      std::snprintf(buf, sizeof buf, " %s(%.0f%%)", label.c_str(), 100.0 * frac);
      out += buf;
    }
    out += '\n';
  }
  std::snprintf(buf, sizeof buf, "%-8s %10zu\n", "total", dist.total);
  out += buf;
  return out;
}

std::string format_oracle(const OracleResult& result, ReportFormat fmt) {
  std::string out;
  write_prf(out, fmt, "oracle", result.score);
  const auto& rep = result.report;
  char buf[256];
  const ConversionReason reasons[] = {ConversionReason::ok, ConversionReason::other_pattern,
                                      ConversionReason::multi_core_dropped, ConversionReason::head_ambiguous,
                                      ConversionReason::slot_collision};
  if (fmt == ReportFormat::kv) {
    std::snprintf(buf, sizeof buf, "sentences=%zu\nrelations.total=%zu\nrelations.converted=%zu\n"
                                   "relations.recovered=%zu\nrelations.ignored_c=%zu\n",
                  result.sentences, rep.total(), rep.converted(), rep.recovered(), result.ignored_c_labels);
    out += buf;
    for (auto r : reasons) {
      std::snprintf(buf, sizeof buf, "reason.%s=%zu\n", to_string(r), rep.count(r));
      out += buf;
    }
    return out;
  }
  std::snprintf(buf, sizeof buf, "sentences %zu, relations %zu, converted %zu, recovered %zu\n", result.sentences,
                rep.total(), rep.converted(), rep.recovered());
  out += buf;
  for (auto r : reasons) {
    std::snprintf(buf, sizeof buf, "  %-20s %zu\n", to_string(r), rep.count(r));
    out += buf;
  }
  return out;
}

}  // namespace depsrl
