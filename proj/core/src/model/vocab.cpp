#include "depsrl/model/vocab.hpp"

#include <map>

#include "depsrl/label.hpp"

namespace depsrl::model {

Vocabulary::Vocabulary(const std::vector<std::string>& items) {
  for (const auto& item : items) add(item);
}

int Vocabulary::add(const std::string& item) {
  const auto [it, inserted] = index_.emplace(item, size());
  if (inserted) items_.push_back(item);
  return it->second;
}

std::optional<int> Vocabulary::find(const std::string& item) const {
  const auto it = index_.find(item);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Vocabulary::index_or(const std::string& item, int fallback) const {
  const auto it = index_.find(item);
  return it == index_.end() ? fallback : it->second;
}

ModelVocab ModelVocab::build(const std::vector<JointSentence>& corpus, int unk_threshold) {
  // Ordered maps keep index assignment independent of hash order.
  std::map<std::string, int> word_counts;
  std::map<std::string, int> syn, d, c, r;
  for (const auto& s : corpus) {
    for (const auto& t : s.tokens) ++word_counts[t.form];
    for (const auto& l : s.tree.labels) {
      ++syn[l.syn];
      if (l.d) ++d[*l.d];
      if (l.c) ++c[serialize_cshare(*l.c)];
      if (l.r) ++r[*l.r];
    }
  }
  ModelVocab v;
  v.words.add("<unk>");
  v.words.add("<root>");
  for (const auto& [w, n] : word_counts)
    if (n >= unk_threshold) v.words.add(w);
  for (auto* voc : {&v.d, &v.c, &v.r}) voc->add(std::string(kAbsentSlot));
  for (const auto& [k, n] : syn) v.syn.add(k);
  for (const auto& [k, n] : d) v.d.add(k);
  for (const auto& [k, n] : c) v.c.add(k);
  for (const auto& [k, n] : r) v.r.add(k);
  return v;
}

LabelIds label_ids(const ModelVocab& vocab, const JointTree& tree) {
  LabelIds ids;
  for (const auto& l : tree.labels) {
    ids.syn.push_back(vocab.syn.index_or(l.syn, -1));
    ids.d.push_back(l.d ? vocab.d.index_or(*l.d, -1) : kAbsentLabel);
    ids.c.push_back(l.c ? vocab.c.index_or(serialize_cshare(*l.c), -1) : kAbsentLabel);
    ids.r.push_back(l.r ? vocab.r.index_or(*l.r, -1) : kAbsentLabel);
  }
  return ids;
}

}  // namespace depsrl::model
