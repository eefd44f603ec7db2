#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "depsrl/types.hpp"

namespace depsrl::model {

class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(const std::vector<std::string>& items);

  int add(const std::string& item);
  std::optional<int> find(const std::string& item) const;
  int index_or(const std::string& item, int fallback) const;
  const std::string& at(int index) const { return items_.at(static_cast<std::size_t>(index)); }
  int size() const { return static_cast<int>(items_.size()); }
  const std::vector<std::string>& items() const { return items_; }

  bool operator==(const Vocabulary& o) const { return items_ == o.items_; }

 private:
  std::vector<std::string> items_;
  std::unordered_map<std::string, int> index_;
};

inline constexpr int kUnkWord = 0;
inline constexpr int kRootWord = 1;
inline constexpr int kAbsentLabel = 0;  // index of `_` in the D/C/R vocabularies

// Word and label inventories. D, C and R reserve index 0 for the absent
// slot; C entries are serialized tuples such as `(ARG0,ARG1)+m`.
struct ModelVocab {
  Vocabulary words;
  Vocabulary syn;
  Vocabulary d;
  Vocabulary c;
  Vocabulary r;

  static ModelVocab build(const std::vector<JointSentence>& corpus, int unk_threshold);

  int word_id(const std::string& form) const { return words.index_or(form, kUnkWord); }

  bool operator==(const ModelVocab&) const = default;
};

// Per-token label indices of a joint tree; labels unseen in the vocabulary
// map to -1.
struct LabelIds {
  std::vector<int> syn, d, c, r;
};
LabelIds label_ids(const ModelVocab& vocab, const JointTree& tree);

}  // namespace depsrl::model
