#include "depsrl/eval.hpp"

#include <cstdio>
#include <set>
#include <stdexcept>
#include <tuple>

#include "depsrl/convert.hpp"
#include "depsrl/tree.hpp"

namespace depsrl {
namespace {

using Relation = std::tuple<std::size_t, int, std::string, Span>;  // sentence, predicate, label, span

std::set<Relation> relations_of(const std::vector<std::vector<SrlFrame>>& corpus) {
  std::set<Relation> out;
  for (std::size_t s = 0; s < corpus.size(); ++s)
    for (const auto& f : corpus[s])
      for (const auto& a : f.arguments) out.insert({s, f.predicate, a.label, a.span});
  return out;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b)
    throw std::invalid_argument("gold and predicted corpora differ in sentence count (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
}

double pct(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

PrfScore PrfScore::from_counts(std::size_t matched, std::size_t predicted, std::size_t gold) {
  PrfScore s;
  s.matched = matched;
  s.predicted = predicted;
  s.gold = gold;
  s.precision = pct(matched, predicted);
  s.recall = pct(matched, gold);
  s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

PrfScore srl_prf(const std::vector<std::vector<SrlFrame>>& gold,
                 const std::vector<std::vector<SrlFrame>>& predicted) {
  check_sizes(gold.size(), predicted.size());
  const auto g = relations_of(gold);
  const auto p = relations_of(predicted);
  std::size_t matched = 0;
  for (const auto& r : p) matched += g.count(r);
  return PrfScore::from_counts(matched, p.size(), g.size());
}

std::map<std::string, PrfScore> per_label_report(const std::vector<std::vector<SrlFrame>>& gold,
                                                 const std::vector<std::vector<SrlFrame>>& predicted) {
  check_sizes(gold.size(), predicted.size());
  const auto g = relations_of(gold);
  const auto p = relations_of(predicted);
  struct Counts { std::size_t m = 0, p = 0, g = 0; };
  std::map<std::string, Counts> counts;
  for (const auto& r : g) ++counts[std::get<2>(r)].g;
  for (const auto& r : p) {
    auto& c = counts[std::get<2>(r)];
    ++c.p;
    if (g.count(r)) ++c.m;
  }
  std::map<std::string, PrfScore> out;
  for (const auto& [label, c] : counts) out[label] = PrfScore::from_counts(c.m, c.p, c.g);
  return out;
}

PatternClass route_pattern(const std::vector<int>& heads, int pred, int arg_head) {
  const auto direct = classify_pattern(heads, pred, arg_head);
  if (direct != PatternClass::Other) return direct;
  // Walk the predicate's ancestors: the argument may hang off one of them
  // (sibling chain) or be one of them (reverse relation then chain).
  const int arg_gov = heads[static_cast<std::size_t>(arg_head - 1)];
  int cur = heads[static_cast<std::size_t>(pred - 1)];
  while (cur != 0) {
    if (cur == arg_head) return PatternClass::C;
    if (arg_gov != 0 && heads[static_cast<std::size_t>(cur - 1)] == arg_gov) return PatternClass::C;
    cur = heads[static_cast<std::size_t>(cur - 1)];
  }
  return PatternClass::Other;
}

std::map<PatternClass, PrfScore> per_pattern_report(const std::vector<AnnotatedSentence>& gold,
                                                    const std::vector<AnnotatedSentence>& predicted) {
  check_sizes(gold.size(), predicted.size());
  struct Counts { std::size_t m = 0, p = 0, g = 0; };
  std::map<PatternClass, Counts> counts;
  for (auto pc : {PatternClass::D, PatternClass::C, PatternClass::R, PatternClass::Other}) counts[pc];

  auto bucket = [](const AnnotatedSentence& s, int pred, const Span& span) {
    const int head = argument_head(s.tree, span).index;
    return route_pattern(s.tree.heads, pred, head);
  };

  for (std::size_t i = 0; i < gold.size(); ++i) {
    std::map<std::tuple<int, std::string, Span>, PatternClass> gold_rel;
    for (const auto& f : gold[i].frames)
      for (const auto& a : f.arguments)
        gold_rel.emplace(std::make_tuple(f.predicate, a.label, a.span), bucket(gold[i], f.predicate, a.span));
    for (const auto& [key, b] : gold_rel) ++counts[b].g;

    std::set<std::tuple<int, std::string, Span>> seen;
    for (const auto& f : predicted[i].frames) {
      for (const auto& a : f.arguments) {
        auto key = std::make_tuple(f.predicate, a.label, a.span);
        if (!seen.insert(key).second) continue;
        if (auto it = gold_rel.find(key); it != gold_rel.end()) {
          ++counts[it->second].m;
          ++counts[it->second].p;
        } else {
          ++counts[bucket(predicted[i], f.predicate, a.span)].p;
        }
      }
    }
  }
  std::map<PatternClass, PrfScore> out;
  for (const auto& [pc, c] : counts) out[pc] = PrfScore::from_counts(c.m, c.p, c.g);
  return out;
}

AttachmentScore AttachmentScore::from_counts(std::size_t heads, std::size_t labeled, std::size_t tokens) {
  AttachmentScore s;
  s.correct_heads = heads;
  s.correct_labeled = labeled;
  s.tokens = tokens;
  s.uas = pct(heads, tokens);
  s.las = pct(labeled, tokens);
  return s;
}

AttachmentScore attachment_scores(const DepTree& gold, const DepTree& predicted) {
  if (gold.size() != predicted.size())
    throw std::invalid_argument("attachment scoring: sentence lengths differ (" +
                                std::to_string(gold.size()) + " vs " +
                                std::to_string(predicted.size()) + ")");
  std::size_t heads = 0, labeled = 0;
  for (int i = 1; i <= gold.size(); ++i) {
    if (gold.head(i) != predicted.head(i)) continue;
    ++heads;
    if (gold.rel(i) == predicted.rel(i)) ++labeled;
  }
  return AttachmentScore::from_counts(heads, labeled, static_cast<std::size_t>(gold.size()));
}

AttachmentScore attachment_scores(const std::vector<DepTree>& gold, const std::vector<DepTree>& predicted) {
  check_sizes(gold.size(), predicted.size());
  std::size_t heads = 0, labeled = 0, tokens = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto s = attachment_scores(gold[i], predicted[i]);
    heads += s.correct_heads;
    labeled += s.correct_labeled;
    tokens += s.tokens;
  }
  return AttachmentScore::from_counts(heads, labeled, tokens);
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "text") return ReportFormat::text;
  if (name == "kv") return ReportFormat::kv;
  throw std::invalid_argument("unknown report format '" + name + "'");
}

void write_prf(std::string& out, ReportFormat fmt, const std::string& name, const PrfScore& s) {
  char buf[1024];
  if (fmt == ReportFormat::kv) {
    std::snprintf(buf, sizeof buf,
                  "%s.precision=%.4f\n%s.recall=%.4f\n%s.f1=%.4f\n%s.matched=%zu\n%s.predicted=%zu\n%s.gold=%zu\n",
                  name.c_str(), s.precision, name.c_str(), s.recall, name.c_str(), s.f1, name.c_str(),
                  s.matched, name.c_str(), s.predicted, name.c_str(), s.gold);
  } else {
    std::snprintf(buf, sizeof buf, "%-16s P %6.2f  R %6.2f  F %6.2f  (matched %zu, predicted %zu, gold %zu)\n",
                  name.c_str(), s.precision, s.recall, s.f1, s.matched, s.predicted, s.gold);
  }
  out += buf;
}

}  // namespace depsrl
