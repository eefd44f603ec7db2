#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "depsrl/analyze.hpp"
#include "depsrl/io.hpp"
#include "depsrl/model/config.hpp"
#include "test_util.hpp"

using namespace depsrl;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("depsrl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  void write(const std::string& p, const std::string& text) const { std::ofstream(p, std::ios::binary) << text; }

  fs::path dir_;
};

std::string fixture() { return testutil::data_path("fixture.full"); }

}  // namespace

TEST_F(Cli, EncodeFixtureConvertsEverything) {
  const auto r = run({"encode", "-i", fixture(), "-o", path("fx.joint"), "--report-format", "kv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("encode.unconverted=0\n"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("encode.relations=107\n"), std::string::npos);
  EXPECT_EQ(io::read_joint(path("fx.joint")).sentences.size(), 30u);
}

TEST_F(Cli, EncodeWantedToStdout) {
  const auto r = run({"encode", "-i", testutil::data_path("wanted.full")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("1\tShe\tPRP\t2\tnsubj|A0|_|_\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("4\tdesign\tVB\t2\txcomp|A1|(A0,A0)|_\n"), std::string::npos);
  EXPECT_NE(r.out.find("6\tbridge\tNN\t4\tdobj|A1|_|_\n"), std::string::npos);
}

TEST_F(Cli, EncodeCountsOtherPattern) {
  const auto r = run({"encode", "-i", testutil::data_path("other_pattern.full"), "--report-format", "kv"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("encode.unconverted=1\n"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("encode.reason.other_pattern=1\n"), std::string::npos);
}

TEST_F(Cli, PipelineMatchesOracle) {
  ASSERT_EQ(run({"encode", "-i", fixture(), "-o", path("a.joint")}).code, 0);
  ASSERT_EQ(run({"decode", "-i", path("a.joint"), "-o", path("a.full")}).code, 0);
  EXPECT_EQ(slurp(path("a.full")), slurp(fixture()));
  const auto e = run({"eval", "--gold", fixture(), "-i", path("a.full"), "--report-format", "kv"});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.err.find("srl.f1=100.0000\n"), std::string::npos) << e.err;
  const auto o = run({"oracle", "-i", fixture(), "--report-format", "kv"});
  EXPECT_NE(o.err.find("oracle.f1=100.0000\n"), std::string::npos) << o.err;

  // same numbers on a lossy corpus
  const auto lossy = path("lossy.full");
  std::string text = slurp(fixture()) + slurp(testutil::data_path("other_pattern.full"));
  write(lossy, text);
  ASSERT_EQ(run({"encode", "-i", lossy, "-o", path("b.joint")}).code, 0);
  ASSERT_EQ(run({"decode", "-i", path("b.joint"), "-o", path("b.full")}).code, 0);
  const auto e2 = run({"eval", "--gold", lossy, "-i", path("b.full"), "--report-format", "kv"});
  const auto o2 = run({"oracle", "-i", lossy, "--report-format", "kv"});
  auto grab = [](const std::string& s, const std::string& key) {
    const auto p = s.find(key + "=");
    return s.substr(p, s.find('\n', p) - p).substr(key.size());
  };
  EXPECT_EQ(grab(e2.err, "srl.f1"), grab(o2.err, "oracle.f1"));
  EXPECT_EQ(grab(e2.err, "srl.recall"), grab(o2.err, "oracle.recall"));
}

TEST_F(Cli, DecodeIgnoresDanglingTuple) {
  write(path("bad.joint"),
        "# predicates = 2,4\n"
        "1\tShe\t_\t2\tnsubj|A0|_|_\n"
        "2\twanted\t_\t0\troot|_|_|_\n"
        "3\tto\t_\t4\tmark|_|_|_\n"
        "4\tdesign\t_\t2\txcomp|A1|(A2,A0)|_\n"
        "5\tthe\t_\t6\tdet|_|_|_\n"
        "6\tbridge\t_\t4\tdobj|A1|_|_\n\n");
  const auto r = run({"decode", "-i", path("bad.joint"), "--report-format", "kv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("decode.ignored_c_labels=1\n"), std::string::npos) << r.err;
  EXPECT_NE(r.out.find("1\tShe\t_\t2\tnsubj\tB-A0\t_\n"), std::string::npos) << r.out;
}

TEST_F(Cli, DecodeBlankSlots) {
  write(path("blank.joint"), "# predicates = 1\n1\tgo\t_\t0\troot|_|_|_\n2\tnow\t_\t1\tadvmod|_|_|_\n\n");
  const auto r = run({"decode", "-i", path("blank.joint")});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "# predicates = 1\n1\tgo\t_\t0\troot\tV\n2\tnow\t_\t1\tadvmod\t_\n\n");
}

TEST_F(Cli, AnalyzeReport) {
  const auto r = run({"analyze", "-i", fixture(), "--report-format", "kv", "-o", path("dist.txt")});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("relations.total=107\n"), std::string::npos);
  EXPECT_EQ(slurp(path("dist.txt")), r.err);
}

TEST_F(Cli, GradCheck) {
  const auto r = run({"gradcheck", "--report-format", "kv"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto p = r.err.find("gradcheck.max_rel_error=");
  ASSERT_NE(p, std::string::npos);
  EXPECT_LT(std::stod(r.err.substr(p + 24)), 1e-4);
}

TEST_F(Cli, Errors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"encode"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"encode", "-i", fixture(), "--lang", "fr"}).code, 2);
  EXPECT_EQ(run({"encode", "-i", path("missing.full")}).code, 1);
  EXPECT_EQ(run({"encode", "-i", fixture(), "-o", path("no/such/dir/x")}).code, 1);
  EXPECT_EQ(run({"parse", "-i", fixture(), "--model", path("m.ck"), "--gold-d"}).code, 2);
  EXPECT_EQ(run({"parse", "-i", fixture(), "--model", path("m.ck"), "--gold-syntax", "--gold-d", "--gold-rc"}).code, 2);
  write(path("broken.full"), "# predicates =\n1\ta\t_\t2\tx\n2\tb\t_\t1\ty\n\n");
  const auto r = run({"analyze", "-i", path("broken.full")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("broken.full:1"), std::string::npos) << r.err;
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, TrainParseEvalIsDeterministic) {
  auto c = model::tiny_config();
  c.train.max_epochs = 2;
  write(path("tiny.json"), model::config_to_json(c));
  for (const char* name : {"a.ck", "b.ck"}) {
    const auto r = run({"train", "-i", fixture(), "--config", path("tiny.json"), "--seed", "3", "--model", path(name)});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("no --dev"), std::string::npos);
  }
  EXPECT_EQ(slurp(path("a.ck")), slurp(path("b.ck")));

  for (const char* name : {"p1.full", "p2.full"})
    ASSERT_EQ(run({"parse", "-i", fixture(), "--model", path("a.ck"), "-o", path(name)}).code, 0);
  EXPECT_EQ(slurp(path("p1.full")), slurp(path("p2.full")));
  const auto e = run({"eval", "--gold", fixture(), "-i", path("p1.full")});
  EXPECT_EQ(e.code, 0) << e.err;

  const auto g = run({"parse", "-i", fixture(), "--model", path("a.ck"), "--gold-syntax", "--gold-d"});
  ASSERT_EQ(g.code, 0) << g.err;
  const auto pred = io::read_full(path("p1.full")).sentences;
  ASSERT_EQ(pred.size(), 30u);

  write(path("plain.txt"), "# predicates = 2\nShe wanted to design the bridge\nHe left\n");
  const auto pl = run({"parse", "-i", path("plain.txt"), "--model", path("a.ck"), "--multi-root"});
  ASSERT_EQ(pl.code, 0) << pl.err;
  std::istringstream in(pl.out);
  const auto doc = io::read_full(in);
  ASSERT_EQ(doc.sentences.size(), 2u);
  EXPECT_EQ(doc.sentences[0].predicates(), (std::vector<int>{2}));
  EXPECT_EQ(run({"parse", "-i", path("plain.txt"), "--model", path("a.ck"), "--gold-syntax"}).code, 2);
}
