#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "depsrl/types.hpp"

namespace depsrl::io {

// Both formats are UTF-8, one token per line, tab-separated, with a blank
// line after every sentence and a `# predicates = i,j,...` header.
//
//   FULL:   INDEX FORM POS HEAD DEPREL PRED_1 ... PRED_k
//           predicate columns hold V on the predicate's own row,
//           B-LABEL / I-LABEL over argument spans and _ elsewhere.
//   JOINT:  INDEX FORM POS HEAD JLABEL

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& source, int line, int column, const std::string& message);

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct FullDocument {
  std::vector<AnnotatedSentence> sentences;
  bool operator==(const FullDocument&) const = default;
};

struct JointDocument {
  std::vector<JointSentence> sentences;
  bool operator==(const JointDocument&) const = default;
};

FullDocument read_full(std::istream& in, const std::string& source = "<stream>");
FullDocument read_full(const std::string& path);
void write_full(std::ostream& out, const FullDocument& doc);
void write_full(const FullDocument& doc, const std::string& path);

JointDocument read_joint(std::istream& in, const std::string& source = "<stream>");
JointDocument read_joint(const std::string& path);
void write_joint(std::ostream& out, const JointDocument& doc);
void write_joint(const JointDocument& doc, const std::string& path);

// Plain input for parsing: one whitespace-tokenized sentence per line,
// optionally preceded by a `# predicates = ...` header.
struct PlainSentence {
  std::vector<std::string> forms;
  std::vector<int> predicates;
};
std::vector<PlainSentence> read_plain(std::istream& in, const std::string& source = "<stream>");

std::string to_full_string(const FullDocument& doc);
std::string to_joint_string(const JointDocument& doc);

}  // namespace depsrl::io
