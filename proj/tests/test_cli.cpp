#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

using namespace testing_support;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome cli(const std::string& args) {
  std::string cmd = std::string(PRECOURANT_CLI) + " " + args + " 2>&1";
  Outcome o;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return o;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) o.out.append(buf, n);
  int st = pclose(f);
  o.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return o;
}

std::string temp_manifest(const std::string& name, const std::string& text) {
  auto p = std::filesystem::temp_directory_path() / ("precourant_test_" + name + ".manifest");
  std::ofstream(p) << text;
  return p.string();
}

std::string golden_json(const std::string& name) { return std::string(PRECOURANT_GOLDEN_DIR) + "/" + name + ".json"; }

TEST(Cli, Version) {
  auto o = cli("--version");
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("0.1.0"), std::string::npos);
}

TEST(Cli, PassingTasksExitZero) {
  auto o = cli("--manifest " + manifest_path("standard_r3") + " --task verify-axioms --task jacobiator-theorem");
  EXPECT_EQ(o.code, 0) << o.out;
  EXPECT_NE(o.out.find("verify-axioms: pass"), std::string::npos);
  EXPECT_NE(o.out.find("note: J vanishes on all frame triples"), std::string::npos);
  EXPECT_NE(o.out.find("overall: pass"), std::string::npos);
}

TEST(Cli, FailingTaskExitOne) {
  std::string text =
      "[chart]\nvars = x1, x2\n[bracket]\npx1 px2 = dx1\n[run]\ntasks = verify-axioms, verify-identities\n";
  auto o = cli("--manifest " + temp_manifest("corrupt", text));
  EXPECT_EQ(o.code, 1) << o.out;
  EXPECT_NE(o.out.find("verify-axioms: fail"), std::string::npos);
  EXPECT_NE(o.out.find("verify-identities: skipped-precondition"), std::string::npos);
}

TEST(Cli, ParseErrorExitTwoWithPosition) {
  auto path = temp_manifest("syntax", "[chart]\nvars = x1\n[builder]\nkind = twisted_exact\nh = x1^\n");
  auto o = cli("--manifest " + path);
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.out.find(path + ":5:7: error:"), std::string::npos) << o.out;
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli("--manifest " + manifest_path("standard_r3") + " --task bogus").code, 2);
  EXPECT_EQ(cli("--manifest " + manifest_path("standard_r3") + " --task dissection").code, 2);
  EXPECT_EQ(cli("--manifest /nonexistent/file.manifest").code, 2);
  EXPECT_EQ(cli("--no-such-flag").code, 2);
  EXPECT_EQ(cli("").code, 2);
}

TEST(Cli, QuietPrintsNothing) {
  auto o = cli("--quiet --manifest " + manifest_path("action_abelian"));
  EXPECT_EQ(o.code, 0);
  EXPECT_TRUE(o.out.empty());
}

TEST(Cli, TimingOnlyWhenRequested) {
  auto o = cli("--json --timing --task verify-axioms --manifest " + manifest_path("action_abelian"));
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("\"seconds\""), std::string::npos);
  auto q = cli("--json --task verify-axioms --manifest " + manifest_path("action_abelian"));
  EXPECT_EQ(q.out.find("\"seconds\""), std::string::npos);
}

TEST(Cli, FlagsEchoed) {
  auto o = cli("--json --seed 5 --trials 2 --max-degree 1 --task verify-axioms --manifest " + manifest_path("standard_r3"));
  EXPECT_EQ(o.code, 0);
  auto j = nlohmann::json::parse(o.out);
  EXPECT_EQ(j["seed"], 5);
  EXPECT_EQ(j["trials"], 2);
  EXPECT_EQ(j["max_degree"], 1);
}

TEST(Cli, DeterministicAcrossRuns) {
  auto a = cli("--json --manifest " + manifest_path("standard_r3"));
  auto b = cli("--json --manifest " + manifest_path("standard_r3"));
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto c = cli("--manifest " + manifest_path("dissection_rank2"));
  auto d = cli("--manifest " + manifest_path("dissection_rank2"));
  EXPECT_EQ(c.out, d.out);
}

class GoldenReport : public ::testing::TestWithParam<const char*> {};

TEST_P(GoldenReport, MatchesFrozenJson) {
  std::string name = GetParam();
  auto o = cli("--json --manifest " + manifest_path(name));
  EXPECT_EQ(o.code, 0) << o.out;
  EXPECT_EQ(o.out, read_file(golden_json(name)));
}

INSTANTIATE_TEST_SUITE_P(Manifests, GoldenReport,
                         ::testing::Values("standard_r3", "twisted_r4", "dissection_rank2", "action_abelian", "twisted_action_synthetic",
                                           "double_nonabelian"));

}  // namespace
