#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "depsrl/analyze.hpp"
#include "depsrl/convert.hpp"
#include "depsrl/eval.hpp"
#include "depsrl/io.hpp"
#include "depsrl/model/checkpoint.hpp"
#include "depsrl/model/config.hpp"
#include "depsrl/model/gradcheck.hpp"
#include "depsrl/model/train.hpp"

namespace depsrl::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string input;
  std::string output;
  std::string lang = "en";
  std::string config;
  std::string model;
  std::string dev;
  std::string gold;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_epochs;
  bool single_root = true;
  bool gold_syntax = false;
  bool gold_d = false;
  bool gold_rc = false;
  std::string report_format = "text";
  double tolerance = 1e-4;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require_readable(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("missing ") + what);
  if (!fs::is_regular_file(path)) throw std::runtime_error(std::string(what) + " not found: " + path);
}

void require_writable_target(const std::string& path) {
  if (path.empty()) return;
  const fs::path parent = fs::absolute(fs::path(path)).parent_path();
  if (!fs::is_directory(parent)) throw std::runtime_error("output directory does not exist: " + parent.string());
}

// Writes to --output when given, else to the data stream.
void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.output, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + o.output + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + o.output);
}

std::string kv_or_text(ReportFormat fmt, const std::string& key, const std::string& text_label, double v,
                       const char* text_fmt = "%.2f") {
  char buf[256];
  if (fmt == ReportFormat::kv) {
    std::snprintf(buf, sizeof buf, "%s=%.4f\n", key.c_str(), v);
  } else {
    char num[64];
    std::snprintf(num, sizeof num, text_fmt, v);
    std::snprintf(buf, sizeof buf, "%-16s %s\n", text_label.c_str(), num);
  }
  return buf;
}

std::string count_line(ReportFormat fmt, const std::string& key, std::size_t v) {
  if (fmt == ReportFormat::kv) return key + "=" + std::to_string(v) + "\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "  %-20s %zu\n", key.substr(key.rfind('.') + 1).c_str(), v);
  return buf;
}

std::string format_encode_report(std::size_t sentences, const ConversionReport& rep, ReportFormat fmt) {
  std::string s;
  const std::size_t unconverted = rep.total() - rep.converted();
  if (fmt == ReportFormat::kv) {
    s += "encode.sentences=" + std::to_string(sentences) + "\n";
    s += "encode.relations=" + std::to_string(rep.total()) + "\n";
    s += "encode.converted=" + std::to_string(rep.converted()) + "\n";
    s += "encode.unconverted=" + std::to_string(unconverted) + "\n";
    s += "encode.recovered=" + std::to_string(rep.recovered()) + "\n";
  } else {
    s += "sentences " + std::to_string(sentences) + ", relations " + std::to_string(rep.total()) + ", converted " +
         std::to_string(rep.converted()) + ", unconverted " + std::to_string(unconverted) + ", recovered " +
         std::to_string(rep.recovered()) + "\n";
  }
  for (auto r : {ConversionReason::ok, ConversionReason::other_pattern, ConversionReason::multi_core_dropped,
                 ConversionReason::head_ambiguous, ConversionReason::slot_collision})
    s += count_line(fmt, std::string("encode.reason.") + to_string(r), rep.count(r));
  return s;
}

model::PredictOptions predict_options(const Options& o) {
  model::PredictOptions p;
  p.single_root = o.single_root;
  p.gold_syntax = o.gold_syntax;
  p.gold_d = o.gold_d;
  p.gold_rc = o.gold_rc;
  p.language = parse_language(o.lang);
  p.validate();
  return p;
}

model::ModelConfig config_for(const Options& o, model::ModelConfig fallback) {
  model::ModelConfig c = o.config.empty() ? fallback : model::load_config(o.config);
  if (o.seed) {
    c.encoder.seed = *o.seed;
    c.train.seed = *o.seed;
  }
  if (o.max_epochs) c.train.max_epochs = *o.max_epochs;
  c.validate();
  return c;
}

// FULL when the first token line carries tab-separated columns starting
// with an integer index; otherwise one sentence per line.
bool looks_like_full(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) return false;
    return std::all_of(line.begin(), line.begin() + static_cast<long>(tab),
                       [](char ch) { return ch >= '0' && ch <= '9'; });
  }
  return true;
}

int cmd_encode(const Options& o, std::ostream& out, std::ostream& err) {
  require_readable(o.input, "--input");
  require_writable_target(o.output);
  const ReportFormat fmt = parse_report_format(o.report_format);
  EncodeOptions eo;
  eo.language = parse_language(o.lang);

  const auto doc = io::read_full(o.input);
  io::JointDocument jd;
  ConversionReport total;
  for (const auto& s : doc.sentences) {
    auto r = encode_joint(s.tree, s.frames, eo);
    jd.sentences.push_back({s.comments, s.tokens, std::move(r.tree), s.predicates()});
    total.relations.insert(total.relations.end(), r.report.relations.begin(), r.report.relations.end());
  }
  emit(o, out, io::to_joint_string(jd));
  err << format_encode_report(doc.sentences.size(), total, fmt);
  return 0;
}

int cmd_decode(const Options& o, std::ostream& out, std::ostream& err) {
  require_readable(o.input, "--input");
  require_writable_target(o.output);
  const ReportFormat fmt = parse_report_format(o.report_format);
  DecodeOptions dopt;
  dopt.language = parse_language(o.lang);

  const auto jd = io::read_joint(o.input);
  io::FullDocument doc;
  std::size_t ignored = 0, noncontiguous = 0, relations = 0;
  for (const auto& js : jd.sentences) {
    auto r = decode_joint_detailed(js.tree, js.predicates, dopt);
    ignored += static_cast<std::size_t>(r.ignored_c_labels);
    noncontiguous += static_cast<std::size_t>(r.noncontiguous_spans);
    for (const auto& f : r.frames) relations += f.arguments.size();
    doc.sentences.push_back({js.comments, js.tokens, js.tree.syntax(), std::move(r.frames)});
  }
  emit(o, out, io::to_full_string(doc));
  if (fmt == ReportFormat::kv) {
    err << "decode.sentences=" << doc.sentences.size() << "\n"
        << "decode.relations=" << relations << "\n"
        << "decode.ignored_c_labels=" << ignored << "\n"
        << "decode.noncontiguous_spans=" << noncontiguous << "\n";
  } else {
    err << "sentences " << doc.sentences.size() << ", relations " << relations << "\n";
    if (ignored) err << "warning: ignored " << ignored << " (C) label(s) naming no governor argument\n";
    if (noncontiguous) err << "warning: " << noncontiguous << " reconstructed span(s) were not contiguous\n";
  }
  return 0;
}

int cmd_analyze(const Options& o, std::ostream& out, std::ostream& err) {
  require_readable(o.input, "--input");
  require_writable_target(o.output);
  const auto doc = io::read_full(o.input);
  const auto text = format_distribution(pattern_stats(doc.sentences), parse_report_format(o.report_format));
  err << text;
  if (!o.output.empty()) emit(o, out, text);
  return 0;
}

int cmd_oracle(const Options& o, std::ostream& out, std::ostream& err) {
  require_readable(o.input, "--input");
  require_writable_target(o.output);
  const ReportFormat fmt = parse_report_format(o.report_format);
  EncodeOptions eo;
  eo.language = parse_language(o.lang);
  const auto doc = io::read_full(o.input);
  const auto text = format_oracle(oracle_roundtrip(doc.sentences, eo), fmt);
  err << text;
  if (!o.output.empty()) emit(o, out, text);
  return 0;
}

int cmd_train(const Options& o, std::ostream&, std::ostream& err) {
  require_readable(o.input, "--input");
  if (o.model.empty()) throw UsageError("train needs --model (checkpoint to write)");
  require_writable_target(o.model);
  if (!o.dev.empty()) require_readable(o.dev, "--dev");
  const auto config = config_for(o, model::desk_config());
  EncodeOptions eo;
  eo.language = parse_language(o.lang);

  const auto train_doc = io::read_full(o.input);
  io::FullDocument dev_doc;
  if (o.dev.empty()) {
    err << "warning: no --dev given, model selection uses the training file\n";
    dev_doc = train_doc;
  } else {
    dev_doc = io::read_full(o.dev);
  }
  const auto corpus = model::encode_corpus(train_doc.sentences, eo);

  model::TrainCallbacks cb;
  const auto start = std::chrono::steady_clock::now();
  cb.on_epoch = [&](const model::EpochStats& e) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char buf[256];
    std::snprintf(buf, sizeof buf, "epoch %3d  loss %.4f  lr %.1e  |g| %7.3f  dev F %6.2f  UAS %6.2f  %6.1fs%s\n",
                  e.epoch, e.train_loss, e.learning_rate, e.max_grad_norm, e.dev.srl.f1, e.dev.attachment.uas,
                  secs, e.improved ? "  *" : "");
    err << buf << std::flush;
  };
  auto result = model::train(corpus, dev_doc.sentences, config, cb);
  model::save_checkpoint(result.model, o.model);
  err << "best epoch " << result.best_epoch << ", checkpoint written to " << o.model << "\n";
  return 0;
}

// BIO columns cannot express overlapping arguments; keep the earlier one in
// canonical order.
std::size_t drop_overlaps(std::vector<AnnotatedSentence>& corpus) {
  std::size_t dropped = 0;
  for (auto& s : corpus)
    for (auto& f : s.frames) {
      std::vector<Argument> kept;
      for (const auto& a : f.arguments) {
        const bool clash = std::any_of(kept.begin(), kept.end(), [&](const Argument& k) {
          return a.span.start <= k.span.end && k.span.start <= a.span.end;
        });
        if (clash)
          ++dropped;
        else
          kept.push_back(a);
      }
      f.arguments = std::move(kept);
    }
  return dropped;
}

int cmd_parse(const Options& o, std::ostream& out, std::ostream& err) {
  require_readable(o.input, "--input");
  require_readable(o.model, "--model");
  require_writable_target(o.output);
  const auto popt = predict_options(o);
  const auto parser = model::load_checkpoint(o.model);

  std::vector<AnnotatedSentence> input;
  if (looks_like_full(o.input)) {
    input = io::read_full(o.input).sentences;
  } else {
    if (popt.gold_syntax) throw UsageError("ablation flags need a FULL input with gold annotations");
    std::ifstream in(o.input);
    for (auto& p : io::read_plain(in, o.input)) {
      AnnotatedSentence s;
      for (std::size_t i = 0; i < p.forms.size(); ++i)
        s.tokens.push_back({static_cast<int>(i) + 1, p.forms[i], std::nullopt});
      s.tree.heads.assign(p.forms.size(), 0);
      s.tree.rels.assign(p.forms.size(), "_");
      for (int pr : p.predicates) s.frames.push_back({pr, {}});
      input.push_back(std::move(s));
    }
  }
  int ignored = 0;
  io::FullDocument doc{model::predict_corpus(parser, input, popt, &ignored)};
  const std::size_t dropped = drop_overlaps(doc.sentences);
  emit(o, out, io::to_full_string(doc));
  if (dropped) err << "warning: dropped " << dropped << " argument(s) overlapping another of the same predicate\n";
  if (ignored) err << "warning: ignored " << ignored << " (C) label(s) naming no governor argument\n";
  err << "parsed " << doc.sentences.size() << " sentence(s)\n";
  return 0;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  require_readable(o.gold, "--gold");
  require_readable(o.input, "--input");
  require_writable_target(o.output);
  const ReportFormat fmt = parse_report_format(o.report_format);
  const auto gold = io::read_full(o.gold).sentences;
  const auto pred = io::read_full(o.input).sentences;
  if (gold.size() != pred.size())
    throw std::runtime_error("sentence count differs: gold " + std::to_string(gold.size()) + ", predicted " +
                             std::to_string(pred.size()));
  std::vector<std::vector<SrlFrame>> gf, pf;
  std::vector<DepTree> gt, pt;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].size() != pred[i].size())
      throw std::runtime_error("sentence " + std::to_string(i + 1) + " has a different length in the two files");
    gf.push_back(gold[i].frames);
    pf.push_back(pred[i].frames);
    gt.push_back(gold[i].tree);
    pt.push_back(pred[i].tree);
  }
  std::string s;
  write_prf(s, fmt, "srl", srl_prf(gf, pf));
  const auto att = attachment_scores(gt, pt);
  s += kv_or_text(fmt, "syntax.uas", "UAS", att.uas);
  s += kv_or_text(fmt, "syntax.las", "LAS", att.las);
  if (fmt == ReportFormat::text) s += "per label\n";
  for (const auto& [label, score] : per_label_report(gf, pf)) write_prf(s, fmt, (fmt == ReportFormat::kv ? "label." : "  ") + label, score);
  if (fmt == ReportFormat::text) s += "per pattern\n";
  for (const auto& [pattern, score] : per_pattern_report(gold, pred))
    write_prf(s, fmt, std::string(fmt == ReportFormat::kv ? "pattern." : "  ") + to_string(pattern), score);
  err << s;
  if (!o.output.empty()) emit(o, out, s);
  return 0;
}

int cmd_gradcheck(const Options& o, std::ostream&, std::ostream& err) {
  const auto config = config_for(o, model::tiny_config());
  model::GradCheckOptions g;
  if (o.seed) g.seed = *o.seed;
  const auto start = std::chrono::steady_clock::now();
  const auto r = model::grad_check_builtin(config, g);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const ReportFormat fmt = parse_report_format(o.report_format);
  std::size_t entries = 0;
  for (const auto& t : r.tensors) entries += static_cast<std::size_t>(t.checked);
  if (fmt == ReportFormat::kv) {
    err << "gradcheck.max_rel_error=" << r.max_rel_error << "\n"
        << "gradcheck.worst_tensor=" << r.worst_tensor << "\n"
        << "gradcheck.tensors=" << r.tensors.size() << "\n"
        << "gradcheck.entries=" << entries << "\n";
  } else {
    for (const auto& t : r.tensors) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "  %-22s %5d entries  rel %.3e  abs %.3e\n", t.name.c_str(), t.checked,
                    t.max_rel_error, t.max_abs_error);
      err << buf;
    }
    char buf[256];
    std::snprintf(buf, sizeof buf, "max relative error %.3e (%s) over %zu entries in %.2fs\n", r.max_rel_error,
                  r.worst_tensor.c_str(), entries, secs);
    err << buf;
  }
  if (r.max_rel_error >= o.tolerance) {
    err << "error: gradient check failed, tolerance " << o.tolerance << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Span SRL as dependency parsing: conversion, analysis, training and parsing."};
  app.name("depsrl");
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool in, bool outp) {
    if (in) sub->add_option("-i,--input", o.input, "input file")->required();
    if (outp) sub->add_option("-o,--output", o.output, "output file (default: standard output)");
    sub->add_option("--report-format", o.report_format, "report style")
        ->check(CLI::IsMember({"text", "kv"}));
  };
  auto lang = [&](CLI::App* sub) {
    sub->add_option("--lang", o.lang, "span heuristic table")->check(CLI::IsMember({"en", "zh"}));
  };

  auto* encode = app.add_subcommand("encode", "FULL -> JOINT forward conversion");
  common(encode, true, true);
  lang(encode);
  auto* decode = app.add_subcommand("decode", "JOINT -> FULL backward conversion");
  common(decode, true, true);
  lang(decode);
  auto* analyze = app.add_subcommand("analyze", "pattern distribution of a FULL corpus");
  common(analyze, true, true);
  auto* oracle = app.add_subcommand("oracle", "encode/decode round-trip score of a FULL corpus");
  common(oracle, true, true);
  lang(oracle);

  auto* train = app.add_subcommand("train", "train a parser on a FULL corpus");
  common(train, true, false);
  lang(train);
  train->add_option("--dev", o.dev, "FULL development corpus (default: the training file)");
  train->add_option("--config", o.config, "JSON model configuration (default: desk settings)");
  train->add_option("--model", o.model, "checkpoint to write")->required();
  train->add_option("--seed", o.seed, "overrides the configured seeds");
  train->add_option("--max-epochs", o.max_epochs, "overrides train.max_epochs");

  auto* parse = app.add_subcommand("parse", "parse FULL or plain text with a checkpoint");
  common(parse, true, true);
  lang(parse);
  parse->add_option("--model", o.model, "checkpoint")->required();
  parse->add_option("--seed", o.seed, "accepted for symmetry; parsing is deterministic");
  parse->add_flag("--single-root,!--multi-root", o.single_root, "exactly one token attaches to the root");
  auto* gs = parse->add_flag("--gold-syntax", o.gold_syntax, "heads and relations from the input");
  auto* gd = parse->add_flag("--gold-d", o.gold_d, "also D slots from the input")->needs(gs);
  parse->add_flag("--gold-rc", o.gold_rc, "also C and R slots from the input")->needs(gs)->excludes(gd);

  auto* eval = app.add_subcommand("eval", "score predicted FULL against gold FULL");
  common(eval, true, true);
  eval->add_option("--gold", o.gold, "gold FULL file")->required();

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of the backward pass");
  gradcheck->add_option("--config", o.config, "JSON model configuration (default: tiny settings)");
  gradcheck->add_option("--seed", o.seed, "parameter jitter seed");
  gradcheck->add_option("--tolerance", o.tolerance, "largest accepted relative error");
  gradcheck->add_option("--report-format", o.report_format, "report style")->check(CLI::IsMember({"text", "kv"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "encode") return cmd_encode(o, out, err);
    if (name == "decode") return cmd_decode(o, out, err);
    if (name == "analyze") return cmd_analyze(o, out, err);
    if (name == "oracle") return cmd_oracle(o, out, err);
    if (name == "train") return cmd_train(o, out, err);
    if (name == "parse") return cmd_parse(o, out, err);
    if (name == "eval") return cmd_eval(o, out, err);
    if (name == "gradcheck") return cmd_gradcheck(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace depsrl::cli
