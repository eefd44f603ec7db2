#include "depsrl/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "depsrl/label.hpp"

namespace depsrl::io {

FormatError::FormatError(const std::string& source, int line, int column, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + (column > 0 ? ":" + std::to_string(column) : "") +
                         ": " + message),
      line_(line),
      column_(column) {}

namespace {

constexpr std::string_view kPredicateHeader = "# predicates";
constexpr std::string_view kEmpty = "_";

struct Line {
  int number;
  std::string text;
};

struct Block {
  int first_line = 0;
  std::vector<std::string> comments;
  std::optional<Line> header;
  std::vector<Line> rows;
};

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const auto pos = s.find(sep, begin);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(begin));
      return out;
    }
    out.push_back(s.substr(begin, pos - begin));
    begin = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_int(std::string_view s, int& value) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, value);
  return res.ec == std::errc() && res.ptr == end;
}

bool is_header(std::string_view line) {
  if (line.substr(0, kPredicateHeader.size()) != kPredicateHeader) return false;
  const auto rest = trim(line.substr(kPredicateHeader.size()));
  return !rest.empty() && rest.front() == '=';
}

std::vector<Block> read_blocks(std::istream& in, const std::string& source) {
  std::vector<Block> blocks;
  Block cur;
  bool open = false;
  std::string text;
  int number = 0;
  auto flush = [&] {
    if (!open) return;
    if (cur.rows.empty())
      throw FormatError(source, cur.first_line, 0, "sentence has comments but no tokens");
    blocks.push_back(std::move(cur));
    cur = Block{};
    open = false;
  };
  while (std::getline(in, text)) {
    ++number;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (trim(text).empty()) {
      flush();
      continue;
    }
    if (!open) {
      open = true;
      cur.first_line = number;
    }
    if (text.front() == '#') {
      if (!cur.rows.empty()) throw FormatError(source, number, 1, "comment inside a sentence");
      if (is_header(text)) {
        if (cur.header) throw FormatError(source, number, 1, "duplicate predicates header");
        cur.header = Line{number, text};
      } else {
        cur.comments.push_back(text);
      }
      continue;
    }
    cur.rows.push_back({number, text});
  }
  flush();
  return blocks;
}

std::vector<int> parse_header(const std::optional<Line>& header, const std::string& source, int n) {
  std::vector<int> preds;
  if (!header) return preds;
  auto rest = trim(std::string_view(header->text).substr(kPredicateHeader.size()));
  rest = trim(rest.substr(1));  // '='
  if (rest.empty()) return preds;
  for (auto item : split(rest, ',')) {
    int p = 0;
    if (!parse_int(trim(item), p))
      throw FormatError(source, header->number, 1, "bad predicate index '" + std::string(item) + "'");
    if (p < 1 || p > n)
      throw FormatError(source, header->number, 1, "predicate " + std::to_string(p) + " outside sentence");
    preds.push_back(p);
  }
  if (!std::is_sorted(preds.begin(), preds.end()) ||
      std::adjacent_find(preds.begin(), preds.end()) != preds.end())
    throw FormatError(source, header->number, 1, "predicate indices must be strictly ascending");
  return preds;
}

// Shared columns INDEX FORM POS HEAD; returns the split fields.
std::vector<std::string_view> parse_token(const Line& row, const std::string& source, int expected_index,
                                          std::size_t min_cols, std::size_t max_cols, Token& token, int& head) {
  auto cols = split(row.text, '\t');
  if (cols.size() < min_cols || cols.size() > max_cols)
    throw FormatError(source, row.number, 0,
                      "expected " + (min_cols == max_cols ? std::to_string(min_cols) : std::to_string(min_cols) + "+") +
                          " columns, found " + std::to_string(cols.size()));
  int index = 0;
  if (!parse_int(cols[0], index) || index != expected_index)
    throw FormatError(source, row.number, 1,
                      "expected token index " + std::to_string(expected_index) + ", found '" +
                          std::string(cols[0]) + "'");
  if (cols[1].empty()) throw FormatError(source, row.number, 2, "empty token form");
  token.index = index;
  token.form = std::string(cols[1]);
  if (cols[2].empty()) throw FormatError(source, row.number, 3, "empty POS column");
  token.pos = cols[2] == kEmpty ? std::nullopt : std::optional<std::string>(cols[2]);
  if (!parse_int(cols[3], head)) throw FormatError(source, row.number, 4, "bad head '" + std::string(cols[3]) + "'");
  return cols;
}

void check_tree(const std::vector<int>& heads, const Block& block, const std::string& source, std::size_t ordinal) {
  try {
    validate_tree(heads);
  } catch (const TreeError& e) {
    throw FormatError(source, block.first_line, 0,
                      "sentence " + std::to_string(ordinal) + ": invalid tree: " + e.what());
  }
}

std::string header_line(const std::vector<int>& preds) {
  std::string out(kPredicateHeader);
  out += " =";
  for (std::size_t i = 0; i < preds.size(); ++i) {
    out += i == 0 ? " " : ",";
    out += std::to_string(preds[i]);
  }
  return out;
}

void check_writable(std::string_view value, const char* what) {
  if (value.empty() || value.find_first_of("\t\n\r") != std::string_view::npos)
    throw std::invalid_argument(std::string(what) + " '" + std::string(value) +
                                "' is empty or contains a tab or newline");
}

void write_comments(std::ostream& out, const std::vector<std::string>& comments) {
  for (const auto& c : comments) {
    if (c.empty() || c.front() != '#' || c.find('\n') != std::string::npos || is_header(c))
      throw std::invalid_argument("malformed comment line '" + c + "'");
    out << c << '\n';
  }
}

void write_token_prefix(std::ostream& out, const Token& t, int head) {
  check_writable(t.form, "token form");
  if (t.pos) check_writable(*t.pos, "POS tag");
  out << t.index << '\t' << t.form << '\t' << (t.pos ? *t.pos : std::string(kEmpty)) << '\t' << head;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// FULL

FullDocument read_full(std::istream& in, const std::string& source) {
  FullDocument doc;
  for (auto& block : read_blocks(in, source)) {
    const std::size_t ordinal = doc.sentences.size() + 1;
    const int n = static_cast<int>(block.rows.size());
    const auto preds = parse_header(block.header, source, n);
    const std::size_t ncols = 5 + preds.size();

    AnnotatedSentence s;
    s.comments = block.comments;
    std::vector<std::vector<std::string>> pred_cols(preds.size());
    for (int i = 1; i <= n; ++i) {
      const auto& row = block.rows[static_cast<std::size_t>(i - 1)];
      Token tok;
      int head = 0;
      const auto cols = parse_token(row, source, i, ncols, ncols, tok, head);
      if (cols[4].empty()) throw FormatError(source, row.number, 5, "empty DEPREL");
      s.tokens.push_back(std::move(tok));
      s.tree.heads.push_back(head);
      s.tree.rels.emplace_back(cols[4]);
      for (std::size_t k = 0; k < preds.size(); ++k) pred_cols[k].emplace_back(cols[5 + k]);
    }
    check_tree(s.tree.heads, block, source, ordinal);

    for (std::size_t k = 0; k < preds.size(); ++k) {
      const int p = preds[k];
      const int column = static_cast<int>(6 + k);
      SrlFrame frame{p, {}};
      std::optional<Argument> open;
      auto close = [&] {
        if (open) frame.arguments.push_back(*open);
        open.reset();
      };
      for (int i = 1; i <= n; ++i) {
        const auto& cell = pred_cols[k][static_cast<std::size_t>(i - 1)];
        const int line = block.rows[static_cast<std::size_t>(i - 1)].number;
        if (i == p) {
          if (cell != "V") throw FormatError(source, line, column, "predicate row must be marked V");
          close();
          continue;
        }
        if (cell == kEmpty) {
          close();
        } else if (cell.rfind("B-", 0) == 0 && cell.size() > 2) {
          close();
          open = Argument{cell.substr(2), {i, i}};
        } else if (cell.rfind("I-", 0) == 0 && cell.size() > 2) {
          if (!open || open->label != cell.substr(2) || open->span.end != i - 1)
            throw FormatError(source, line, column, "'" + cell + "' does not continue an open argument");
          open->span.end = i;
        } else {
          throw FormatError(source, line, column, "bad predicate column value '" + cell + "'");
        }
      }
      close();
      try {
        validate_frame(frame, n);
      } catch (const TreeError& e) {
        throw FormatError(source, block.first_line, column, e.what());
      }
      canonicalize(frame);
      s.frames.push_back(std::move(frame));
    }
    doc.sentences.push_back(std::move(s));
  }
  return doc;
}

FullDocument read_full(const std::string& path) {
  auto in = open_in(path);
  return read_full(in, path);
}

void write_full(std::ostream& out, const FullDocument& doc) {
  for (const auto& s : doc.sentences) {
    const int n = s.size();
    if (n == 0) throw std::invalid_argument("cannot write an empty sentence");
    if (s.tree.size() != n) throw std::invalid_argument("tree size does not match token count");
    auto frames = s.frames;
    std::sort(frames.begin(), frames.end(), [](const auto& a, const auto& b) { return a.predicate < b.predicate; });

    std::vector<int> preds;
    std::vector<std::vector<std::string>> cols(frames.size(), std::vector<std::string>(static_cast<std::size_t>(n), "_"));
    for (std::size_t k = 0; k < frames.size(); ++k) {
      const auto& f = frames[k];
      validate_frame(f, n);
      if (!preds.empty() && preds.back() == f.predicate)
        throw std::invalid_argument("duplicate frame for predicate " + std::to_string(f.predicate));
      preds.push_back(f.predicate);
      auto& col = cols[k];
      col[static_cast<std::size_t>(f.predicate - 1)] = "V";
      for (const auto& a : f.arguments) {
        check_writable(a.label, "argument label");
        for (int i = a.span.start; i <= a.span.end; ++i) {
          auto& cell = col[static_cast<std::size_t>(i - 1)];
          if (cell != "_")
            throw std::invalid_argument("overlapping arguments of predicate " + std::to_string(f.predicate) +
                                        " cannot be written in BIO form");
          cell = (i == a.span.start ? "B-" : "I-") + a.label;
        }
      }
    }

    write_comments(out, s.comments);
    out << header_line(preds) << '\n';
    for (int i = 1; i <= n; ++i) {
      write_token_prefix(out, s.tokens[static_cast<std::size_t>(i - 1)], s.tree.head(i));
      check_writable(s.tree.rel(i), "relation");
      out << '\t' << s.tree.rel(i);
      for (const auto& col : cols) out << '\t' << col[static_cast<std::size_t>(i - 1)];
      out << '\n';
    }
    out << '\n';
  }
}

void write_full(const FullDocument& doc, const std::string& path) {
  auto out = open_out(path);
  write_full(out, doc);
}

std::string to_full_string(const FullDocument& doc) {
  std::ostringstream os;
  write_full(os, doc);
  return os.str();
}

// ---------------------------------------------------------------------------
// JOINT

JointDocument read_joint(std::istream& in, const std::string& source) {
  JointDocument doc;
  for (auto& block : read_blocks(in, source)) {
    const std::size_t ordinal = doc.sentences.size() + 1;
    const int n = static_cast<int>(block.rows.size());
    JointSentence s;
    s.comments = block.comments;
    s.predicates = parse_header(block.header, source, n);
    for (int i = 1; i <= n; ++i) {
      const auto& row = block.rows[static_cast<std::size_t>(i - 1)];
      Token tok;
      int head = 0;
      const auto cols = parse_token(row, source, i, 5, 5, tok, head);
      try {
        s.tree.labels.push_back(parse_label(cols[4]));
      } catch (const LabelError& e) {
        throw FormatError(source, row.number, 5, e.what());
      }
      s.tokens.push_back(std::move(tok));
      s.tree.heads.push_back(head);
    }
    check_tree(s.tree.heads, block, source, ordinal);
    doc.sentences.push_back(std::move(s));
  }
  return doc;
}

JointDocument read_joint(const std::string& path) {
  auto in = open_in(path);
  return read_joint(in, path);
}

void write_joint(std::ostream& out, const JointDocument& doc) {
  for (const auto& s : doc.sentences) {
    const int n = s.size();
    if (n == 0) throw std::invalid_argument("cannot write an empty sentence");
    if (s.tree.size() != n || static_cast<int>(s.tree.labels.size()) != n)
      throw std::invalid_argument("joint tree size does not match token count");
    write_comments(out, s.comments);
    out << header_line(s.predicates) << '\n';
    for (int i = 1; i <= n; ++i) {
      write_token_prefix(out, s.tokens[static_cast<std::size_t>(i - 1)], s.tree.head(i));
      out << '\t' << serialize_label(s.tree.label(i)) << '\n';
    }
    out << '\n';
  }
}

void write_joint(const JointDocument& doc, const std::string& path) {
  auto out = open_out(path);
  write_joint(out, doc);
}

std::string to_joint_string(const JointDocument& doc) {
  std::ostringstream os;
  write_joint(os, doc);
  return os.str();
}

// ---------------------------------------------------------------------------
// Plain

std::vector<PlainSentence> read_plain(std::istream& in, const std::string& source) {
  std::vector<PlainSentence> out;
  std::optional<Line> header;
  std::string text;
  int number = 0;
  while (std::getline(in, text)) {
    ++number;
    const auto line = trim(text);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (is_header(line)) header = Line{number, std::string(line)};
      continue;
    }
    PlainSentence s;
    std::istringstream words{std::string(line)};
    for (std::string w; words >> w;) s.forms.push_back(w);
    s.predicates = parse_header(header, source, static_cast<int>(s.forms.size()));
    header.reset();
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace depsrl::io
