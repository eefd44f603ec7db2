#include "depsrl/convert.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string_view>
#include <tuple>

#include "depsrl/tree.hpp"

namespace depsrl {

// ---------------------------------------------------------------------------
// Argument heads and structural patterns

ArgumentHead argument_head(const DepTree& tree, Span span) {
  if (span.start > span.end) throw ConversionError("empty argument span");
  if (span.start < 1 || span.end > tree.size())
    throw ConversionError("argument span outside sentence");

  ArgumentHead best;
  int best_cover = -1;
  for (int c = span.start; c <= span.end; ++c) {
    const int h = tree.head(c);
    if (h != 0 && span.contains(h)) continue;
    int cover = 0;
    for (int t = span.start; t <= span.end; ++t)
      if (dominates(tree.heads, c, t)) ++cover;
    if (cover > best_cover) {
      best = {c, false};
      best_cover = cover;
    } else if (cover == best_cover) {
      best.ambiguous = true;
    }
  }
  return best;
}

PatternClass classify_pattern(const std::vector<int>& heads, int pred, int arg_head) {
  const int hp = heads[static_cast<std::size_t>(pred - 1)];
  const int ha = heads[static_cast<std::size_t>(arg_head - 1)];
  if (ha == pred) return PatternClass::D;
  if (hp == arg_head) return PatternClass::R;
  if (hp == ha && hp != 0) return PatternClass::C;
  return PatternClass::Other;
}

PatternClass classify_pattern(const DepTree& tree, int pred, int arg_head) {
  return classify_pattern(tree.heads, pred, arg_head);
}

// ---------------------------------------------------------------------------
// Span reconstruction

namespace {

ReconstructedSpan union_span(const std::vector<bool>& mask) {
  int lo = -1, hi = -1, count = 0;
  for (int t = 1; t < static_cast<int>(mask.size()); ++t) {
    if (!mask[static_cast<std::size_t>(t)]) continue;
    if (lo < 0) lo = t;
    hi = t;
    ++count;
  }
  return {{lo, hi}, count == hi - lo + 1};
}

void merge_into(std::vector<bool>& acc, const std::vector<bool>& other) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = acc[i] || other[i];
}

ReconstructedSpan english_reverse_left(const std::vector<int>& heads, int pred, int arg_head) {
  std::vector<bool> keep(heads.size() + 1, false);
  keep[static_cast<std::size_t>(arg_head)] = true;
  const auto kids = children_of(heads);
  for (int c : kids[static_cast<std::size_t>(arg_head)]) {
    const auto sub = subtree_mask(heads, c);
    if (sub[static_cast<std::size_t>(pred)]) continue;
    if (subtree_span(heads, c).span.end < pred) merge_into(keep, sub);
  }
  return union_span(keep);
}

ReconstructedSpan english_reverse_right(const std::vector<int>& heads, int pred, int arg_head) {
  std::vector<bool> keep(heads.size() + 1, false);
  keep[static_cast<std::size_t>(arg_head)] = true;
  const auto kids = children_of(heads);
  for (int c : kids[static_cast<std::size_t>(arg_head)]) {
    if (c < arg_head) continue;
    const auto sub = subtree_mask(heads, c);
    if (sub[static_cast<std::size_t>(pred)]) continue;
    merge_into(keep, sub);
  }
  return union_span(keep);
}

const SpanRules kEnglishRules{&english_reverse_left, &english_reverse_right};

}  // namespace

Language parse_language(const std::string& tag) {
  if (tag == "en") return Language::en;
  if (tag == "zh") return Language::zh;
  throw ConversionError("unknown language tag '" + tag + "'");
}

const char* to_string(Language lang) { return lang == Language::zh ? "zh" : "en"; }

const SpanRules& span_rules(Language) { return kEnglishRules; }

ReconstructedSpan reconstruct_span(const std::vector<int>& heads, PatternClass pattern, int pred,
                                   int arg_head, std::optional<Span> shared,
                                   const SpanRules& rules) {
  switch (pattern) {
    case PatternClass::D: {
      const auto s = subtree_span(heads, arg_head);
      return {s.span, s.contiguous};
    }
    case PatternClass::R:
      return arg_head < pred ? rules.reverse_left(heads, pred, arg_head)
                             : rules.reverse_right(heads, pred, arg_head);
    case PatternClass::C:
      if (!shared) throw ConversionError("(C) reconstruction needs the shared span");
      return {*shared, true};
    case PatternClass::Other: break;
  }
  throw ConversionError("no span reconstruction for pattern Other");
}

const char* to_string(ConversionReason r) {
  switch (r) {
    case ConversionReason::ok: return "ok";
    case ConversionReason::other_pattern: return "other_pattern";
    case ConversionReason::multi_core_dropped: return "multi_core_dropped";
    case ConversionReason::head_ambiguous: return "head_ambiguous";
    case ConversionReason::slot_collision: return "slot_collision";
  }
  return "?";
}

std::size_t ConversionReport::converted() const {
  return static_cast<std::size_t>(std::count_if(relations.begin(), relations.end(),
                                                [](const auto& r) { return r.converted(); }));
}

std::size_t ConversionReport::recovered() const {
  return static_cast<std::size_t>(std::count_if(relations.begin(), relations.end(),
                                                [](const auto& r) { return r.recovered; }));
}

std::size_t ConversionReport::count(ConversionReason reason) const {
  return static_cast<std::size_t>(std::count_if(
      relations.begin(), relations.end(), [&](const auto& r) { return r.reason == reason; }));
}

// ---------------------------------------------------------------------------
// Argument holdings shared by both directions

namespace {

struct Holding {
  std::string label;
  Span span;
  PatternClass route = PatternClass::D;
  bool contiguous = true;
};

// Arguments each token holds during backward conversion. The forward pass
// runs the same machinery so that its (C) choices resolve exactly as the
// backward pass will resolve them.
class HoldingTable {
 public:
  explicit HoldingTable(int n) : table_(static_cast<std::size_t>(n + 1)) {}

  void add(int token, Holding h) {
    auto& list = table_[static_cast<std::size_t>(token)];
    for (const auto& e : list)
      if (e.label == h.label && e.span == h.span) return;
    list.push_back(std::move(h));
  }

  const std::vector<Holding>& at(int token) const { return table_[static_cast<std::size_t>(token)]; }

  // A label resolves to its leftmost-spanned holding.
  const Holding* resolve(int token, std::string_view label) const {
    const Holding* best = nullptr;
    for (const auto& e : at(token))
      if (e.label == label && (!best || e.span < best->span)) best = &e;
    return best;
  }

  bool holds_null(int token) const { return resolve(token, kNullArgLabel) != nullptr; }

 private:
  std::vector<std::vector<Holding>> table_;
};

HoldingTable collect_direct(const JointTree& jt, const std::vector<bool>& is_pred,
                            const SpanRules& rules, int* noncontiguous) {
  const int n = jt.size();
  HoldingTable table(n);
  for (int j = 1; j <= n; ++j) {
    const int h = jt.head(j);
    if (h == 0) continue;
    const auto& lab = jt.label(j);
    if (lab.d && (is_pred[static_cast<std::size_t>(h)] || *lab.d == kNullArgLabel)) {
      const auto s = reconstruct_span(jt.heads, PatternClass::D, h, j, std::nullopt, rules);
      if (!s.contiguous && noncontiguous) ++*noncontiguous;
      table.add(h, {*lab.d, s.span, PatternClass::D, s.contiguous});
    }
    if (lab.r && is_pred[static_cast<std::size_t>(j)] && *lab.r != kNullArgLabel) {
      const auto s = reconstruct_span(jt.heads, PatternClass::R, j, h, std::nullopt, rules);
      if (!s.contiguous && noncontiguous) ++*noncontiguous;
      table.add(j, {*lab.r, s.span, PatternClass::R, s.contiguous});
    }
  }
  return table;
}

// Grants `child` the arguments its governor shares through `share`.
// Returns false when the tuple names an argument the governor lacks.
bool apply_share(HoldingTable& table, int child, int governor, const CShare& share) {
  bool valid = true;
  const std::string_view wanted = share.parent ? std::string_view(*share.parent)
                                               : std::string_view(kNullArgLabel);
  if (const Holding* src = table.resolve(governor, wanted)) {
    Holding copy{share.child, src->span, PatternClass::C, src->contiguous};
    table.add(child, std::move(copy));
  } else {
    valid = false;
  }
  if (share.propagate_argm) {
    std::vector<Holding> mods;
    for (const auto& e : table.at(governor))
      if (is_modifier_label(e.label)) mods.push_back({e.label, e.span, PatternClass::C, e.contiguous});
    for (auto& m : mods) table.add(child, std::move(m));
  }
  return valid;
}

std::vector<bool> predicate_mask(int n, const std::vector<int>& predicates) {
  std::vector<bool> mask(static_cast<std::size_t>(n + 1), false);
  for (int p : predicates) {
    if (p < 1 || p > n) throw ConversionError("predicate " + std::to_string(p) + " outside sentence");
    mask[static_cast<std::size_t>(p)] = true;
  }
  return mask;
}

}  // namespace

// ---------------------------------------------------------------------------
// Backward conversion

DecodeResult decode_joint_detailed(const JointTree& jt, const std::vector<int>& predicates,
                                   const DecodeOptions& options) {
  const int n = jt.size();
  const auto& rules = span_rules(options.language);
  const auto is_pred = predicate_mask(n, predicates);

  DecodeResult result;
  auto table = collect_direct(jt, is_pred, rules, &result.noncontiguous_spans);

  for (int q : preorder(jt.heads)) {
    const int g = jt.head(q);
    const auto& share = jt.label(q).c;
    if (g == 0 || !share || !is_pred[static_cast<std::size_t>(q)]) continue;
    if (!apply_share(table, q, g, *share)) ++result.ignored_c_labels;
  }

  std::vector<int> preds = predicates;
  std::sort(preds.begin(), preds.end());
  preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
  for (int p : preds) {
    std::vector<std::pair<Argument, PatternClass>> args;
    for (const auto& h : table.at(p)) {
      if (h.label == kNullArgLabel) continue;
      if (h.span.contains(p)) continue;  // never a valid argument of its own predicate
      args.push_back({{h.label, h.span}, h.route});
    }
    std::sort(args.begin(), args.end(), [](const auto& a, const auto& b) {
      if (a.first.span != b.first.span) return a.first.span < b.first.span;
      return a.first.label < b.first.label;
    });
    args.erase(std::unique(args.begin(), args.end(),
                           [](const auto& a, const auto& b) { return a.first == b.first; }),
               args.end());
    SrlFrame frame{p, {}};
    std::vector<PatternClass> routes;
    for (auto& [arg, route] : args) {
      frame.arguments.push_back(std::move(arg));
      routes.push_back(route);
    }
    result.frames.push_back(std::move(frame));
    result.routes.push_back(std::move(routes));
  }
  return result;
}

std::vector<SrlFrame> decode_joint(const JointTree& jt, const std::vector<int>& predicates,
                                   const DecodeOptions& options) {
  return decode_joint_detailed(jt, predicates, options).frames;
}

// ---------------------------------------------------------------------------
// Forward conversion

namespace {

struct ShareCandidate {
  std::size_t relation;       // index into the report
  std::optional<std::string> parent;  // nullopt: needs the dummy relation
  bool needs_dummy = false;
};

}  // namespace

EncodeResult encode_joint(const DepTree& tree, const std::vector<SrlFrame>& frames,
                          const EncodeOptions& options) {
  validate_tree(tree);
  const int n = tree.size();
  const auto& rules = span_rules(options.language);

  // Merge frames per predicate and put arguments in canonical order so the
  // result does not depend on the order frames were supplied in.
  std::map<int, SrlFrame> by_pred;
  for (const auto& f : frames) {
    validate_frame(f, n);
    auto& slot = by_pred[f.predicate];
    slot.predicate = f.predicate;
    slot.arguments.insert(slot.arguments.end(), f.arguments.begin(), f.arguments.end());
  }
  std::vector<int> predicates;
  for (auto& [p, f] : by_pred) {
    canonicalize(f);
    predicates.push_back(p);
  }
  const auto is_pred = predicate_mask(n, predicates);

  EncodeResult out;
  auto& jt = out.tree;
  jt.heads = tree.heads;
  jt.labels.resize(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) jt.label(i).syn = tree.rel(i);

  auto& records = out.report.relations;
  std::vector<bool> ambiguous;
  std::vector<std::vector<std::size_t>> rel_of(static_cast<std::size_t>(n + 1));
  for (const auto& [p, f] : by_pred) {
    for (const auto& arg : f.arguments) {
      const auto head = argument_head(tree, arg.span);
      RelationRecord rec;
      rec.predicate = p;
      rec.argument = arg;
      rec.arg_head = head.index;
      rec.pattern = classify_pattern(tree, p, head.index);
      rel_of[static_cast<std::size_t>(p)].push_back(records.size());
      records.push_back(std::move(rec));
      ambiguous.push_back(head.ambiguous);
    }
  }

  // Direct slots.
  for (auto& rec : records) {
    if (rec.pattern == PatternClass::D) {
      auto& slot = jt.label(rec.arg_head).d;
      if (slot) {
        rec.reason = ConversionReason::slot_collision;
        continue;
      }
      slot = rec.argument.label;
      rec.route = PatternClass::D;
    } else if (rec.pattern == PatternClass::R) {
      auto& slot = jt.label(rec.predicate).r;
      if (slot) {
        rec.reason = ConversionReason::slot_collision;
        continue;
      }
      slot = rec.argument.label;
      rec.route = PatternClass::R;
    }
  }

  auto table = collect_direct(jt, is_pred, rules, nullptr);
  std::mt19937_64 rng(options.share_seed.value_or(0));

  // (C) tuples, top-down so every governor's holdings are final before its
  // dependents read them.
  for (int q : preorder(tree.heads)) {
    if (!is_pred[static_cast<std::size_t>(q)]) continue;
    const int g = tree.head(q);
    auto& rels = rel_of[static_cast<std::size_t>(q)];
    std::vector<std::size_t> pending;
    for (auto idx : rels)
      if (!records[idx].route && records[idx].reason != ConversionReason::slot_collision)
        pending.push_back(idx);
    if (g == 0) {
      for (auto idx : pending) records[idx].reason = ConversionReason::other_pattern;
      continue;
    }

    std::set<Argument> gold;
    for (auto idx : rels) gold.insert(records[idx].argument);

    std::vector<const Holding*> mods;
    for (const auto& h : table.at(g))
      if (is_modifier_label(h.label)) mods.push_back(&h);
    const bool flag = !mods.empty() && std::all_of(mods.begin(), mods.end(), [&](const Holding* h) {
      return gold.count(Argument{h->label, h->span}) > 0;
    });

    std::vector<ShareCandidate> candidates;
    for (auto idx : pending) {
      auto& rec = records[idx];
      if (flag && is_modifier_label(rec.argument.label) &&
          std::any_of(mods.begin(), mods.end(), [&](const Holding* h) {
            return h->label == rec.argument.label && h->span == rec.argument.span;
          })) {
        rec.route = PatternClass::C;
        continue;
      }
      // Prefer an argument the governor already holds under a label that
      // resolves back to this exact span.
      std::optional<std::string> via;
      for (const auto& h : table.at(g)) {
        if (h.span != rec.argument.span) continue;
        const Holding* first = table.resolve(g, h.label);
        if (first && first->span == h.span) {
          via = h.label;
          break;
        }
      }
      if (via) {
        ShareCandidate c{idx, *via == kNullArgLabel ? std::nullopt : via, false};
        candidates.push_back(c);
      } else if (rec.pattern == PatternClass::C && !jt.label(rec.arg_head).d && !table.holds_null(g)) {
        candidates.push_back({idx, std::nullopt, true});
      } else {
        rec.reason = rec.pattern == PatternClass::C ? ConversionReason::slot_collision
                                                    : ConversionReason::other_pattern;
      }
    }

    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](const ShareCandidate& a, const ShareCandidate& b) {
                       const auto& ra = records[a.relation];
                       const auto& rb = records[b.relation];
                       return std::make_tuple(is_modifier_label(ra.argument.label), ra.argument.label,
                                              a.needs_dummy, ra.argument.span) <
                              std::make_tuple(is_modifier_label(rb.argument.label), rb.argument.label,
                                              b.needs_dummy, rb.argument.span);
                     });
    std::size_t pick = 0;
    if (options.share_seed && !candidates.empty()) {
      std::size_t cores = 0;
      while (cores < candidates.size() &&
             !is_modifier_label(records[candidates[cores].relation].argument.label))
        ++cores;
      if (cores > 1) pick = std::uniform_int_distribution<std::size_t>(0, cores - 1)(rng);
    }

    std::optional<CShare> share;
    if (!candidates.empty()) {
      const auto& chosen = candidates[pick];
      auto& rec = records[chosen.relation];
      share = CShare{chosen.parent, rec.argument.label, flag};
      rec.route = PatternClass::C;
      if (chosen.needs_dummy) {
        jt.label(rec.arg_head).d = std::string(kNullArgLabel);
        const auto s = reconstruct_span(jt.heads, PatternClass::D, g, rec.arg_head, std::nullopt, rules);
        table.add(g, {kNullArgLabel, s.span, PatternClass::D, s.contiguous});
      }
      for (std::size_t k = 0; k < candidates.size(); ++k)
        if (k != pick) records[candidates[k].relation].reason = ConversionReason::multi_core_dropped;
    } else if (flag) {
      // The flag needs a carrier tuple; restate the first shared modifier.
      const Holding* first = *std::min_element(mods.begin(), mods.end(), [](auto* a, auto* b) {
        return std::tie(a->span, a->label) < std::tie(b->span, b->label);
      });
      first = table.resolve(g, first->label);
      share = CShare{first->label, first->label, true};
    }
    if (share) {
      jt.label(q).c = share;
      apply_share(table, q, g, *share);
    }
  }

  for (std::size_t k = 0; k < records.size(); ++k) {
    auto& rec = records[k];
    if (!rec.route) {
      if (rec.reason == ConversionReason::ok) rec.reason = ConversionReason::other_pattern;
    } else if (ambiguous[k]) {
      rec.reason = ConversionReason::head_ambiguous;
    }
  }

  // Score each relation against what backward conversion actually returns.
  const auto decoded = decode_joint(jt, predicates, {options.language});
  std::set<std::tuple<int, std::string, Span>> found;
  for (const auto& f : decoded)
    for (const auto& a : f.arguments) found.insert({f.predicate, a.label, a.span});
  for (auto& rec : records)
    rec.recovered = found.count({rec.predicate, rec.argument.label, rec.argument.span}) > 0;
  return out;
}

}  // namespace depsrl
