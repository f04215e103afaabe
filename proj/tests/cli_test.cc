// Copyright 2025 The Anchoreval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "anchoreval/cli.h"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "anchoreval/aggregate.h"
#include "anchoreval/hashing.h"
#include "mock_server.h"
#include "test_util.h"

namespace anchoreval {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult Cli(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = RunCli(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string SimConfigPath() { return (testing::SourceDir() / "data" / "simconfig.json").string(); }
std::string SampleItems() { return testing::SampleItemsPath().string(); }

// Digest of every file under dir, keyed by relative path.
std::string TreeDigest(const fs::path& dir) {
  std::vector<std::string> entries;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    entries.push_back(fs::relative(e.path(), dir).string() + ":" +
                      Sha256Hex(ReadFile(e.path())));
  }
  std::sort(entries.begin(), entries.end());
  std::string all;
  for (const auto& s : entries) all += s + "\n";
  return all;
}

TEST(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(Cli({}).code, kExitConfig);
  EXPECT_EQ(Cli({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(Cli({"score"}).code, kExitConfig);
  EXPECT_EQ(Cli({"score", "--config", "/nonexistent/run.json"}).code, kExitConfig);
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
}

TEST(CliTest, BadConfigContentsExitTwo) {
  testing::TempDir dir;
  WriteFile(dir / "run.json", "{ not json");
  CliResult r = Cli({"judge", "--config", (dir / "run.json").string()});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("config error"), std::string::npos);
  WriteFile(dir / "run2.json", R"({"item_set": "missing.json", "baseset": ".", "candidate": {"id": "x"}, "output_dir": "o"})");
  EXPECT_EQ(Cli({"score", "--config", (dir / "run2.json").string()}).code, kExitConfig);
}

TEST(CliTest, SimulateThenScore) {
  testing::TempDir dir;
  CliResult sim = Cli({"simulate", "--config", SimConfigPath(), "--items", SampleItems(),
                       "--out", dir.path().string()});
  ASSERT_EQ(sim.code, kExitOk) << sim.err;
  const std::string before = TreeDigest(dir / "baseset");

  CliResult score = Cli({"score", "--config", (dir / "run.json").string()});
  ASSERT_EQ(score.code, kExitOk) << score.err;
  EXPECT_EQ(score.err, "");
  EXPECT_EQ(TreeDigest(dir / "baseset"), before);

  ScoreReport r = ParseReport(ReadFile(dir / "run" / "report.json"));
  EXPECT_FALSE(r.incomplete);
  EXPECT_EQ(r.per_slice.at(Slice::kOverall).matches, 1400);
  EXPECT_GT(*r.per_slice.at(Slice::kOverall).lt, 9.0);
  ASSERT_TRUE(r.cost);
  EXPECT_EQ(r.cost->total.ToCents(), "6.59");
  std::string md = ReadFile(dir / "run" / "report.md");
  for (const std::string& label : ChecklistLabels()) EXPECT_NE(md.find(label), std::string::npos);

  CliResult report = Cli({"report", "--config", (dir / "run.json").string()});
  EXPECT_EQ(report.code, kExitOk);
  EXPECT_EQ(report.out, md);

  CliResult dump = Cli({"inspect", "--config", (dir / "run.json").string(), "--dump",
                        "item=enja-easy-01"});
  EXPECT_EQ(dump.code, kExitOk);
  EXPECT_EQ(dump.out.rfind("20 judgment(s)\n", 0), 0u);

  CliResult valid = Cli({"validate-baseset", "--baseset", (dir / "baseset").string(),
                         "--items", SampleItems()});
  EXPECT_EQ(valid.code, kExitOk) << valid.out;
}

TEST(CliTest, SimulateIsDeterministic) {
  testing::TempDir a, b;
  ASSERT_EQ(Cli({"simulate", "--config", SimConfigPath(), "--items", SampleItems(), "--out",
                 a.path().string()}).code, kExitOk);
  ASSERT_EQ(Cli({"simulate", "--config", SimConfigPath(), "--items", SampleItems(), "--out",
                 b.path().string()}).code, kExitOk);
  EXPECT_EQ(ReadFile(a / "run/judgments.jsonl"), ReadFile(b / "run/judgments.jsonl"));
  EXPECT_EQ(TreeDigest(a.path()), TreeDigest(b.path()));
}

TEST(CliTest, MissingJudgmentsGiveIncompleteReport) {
  testing::TempDir dir;
  ASSERT_EQ(Cli({"simulate", "--config", SimConfigPath(), "--items", SampleItems(), "--out",
                 dir.path().string()}).code, kExitOk);
  std::string log = ReadFile(dir / "run/judgments.jsonl");
  size_t cut = 0;
  for (int i = 0; i < 1000; ++i) cut = log.find('\n', cut) + 1;
  WriteFile(dir / "run/judgments.jsonl", log.substr(0, cut));
  CliResult r = Cli({"score", "--config", (dir / "run.json").string()});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.err.find("incomplete"), std::string::npos);
  EXPECT_TRUE(ParseReport(ReadFile(dir / "run/report.json")).incomplete);
}

TEST(CliTest, BiasSweepTable) {
  CliResult r = Cli({"simulate", "--config", SimConfigPath(), "--bias-sweep",
                     "--sweep-judgments", "4000", "--biases", "0,0.1,0.2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("Slot-A win rate"), std::string::npos);
  EXPECT_NE(r.out.find("| 0.100 | 4000 |"), std::string::npos);
  CliResult j = Cli({"simulate", "--config", SimConfigPath(), "--bias-sweep", "--json",
                     "--sweep-judgments", "2000", "--biases", "0.1"});
  ASSERT_EQ(j.code, kExitOk);
  Json rows = Json::parse(j.out);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0]["slot_a_win_rate"].get<double>(), 0.6, 0.05);
}

TEST(CliTest, CostFromFlags) {
  CliResult r = Cli({"cost", "--mean-input", "2626", "--mean-output", "1567", "--count",
                     "1400", "--input-price", "0.30", "--output-price", "2.50"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("total: 6.59 USD"), std::string::npos);
  EXPECT_EQ(Cli({"cost", "--count", "3"}).code, kExitConfig);
}

// Builds a run whose candidate and judge both live on a mock server.
class LiveRunTest : public ::testing::Test {
 protected:
  void Setup(const std::string& judge_url) {
    ASSERT_EQ(Cli({"simulate", "--config", SimConfigPath(), "--items", SampleItems(), "--out",
                   dir_.path().string()}).code, kExitOk);
    WriteFile(dir_ / "judge_profile.json",
              Json{{"base_url", judge_url}, {"max_retries", 1}, {"backoff_initial_ms", 1},
                   {"max_concurrency", 4}}.dump());
    WriteFile(dir_ / "live.json",
              Json{{"item_set", "itemset.json"},
                   {"baseset", "baseset"},
                   {"candidate", {{"id", "live/model"}, {"endpoint", server_.base_url()}}},
                   {"judge_profile", "judge_profile.json"},
                   {"prices", "prices.json"},
                   {"output_dir", "live"}}.dump());
  }

  static void Handle(const Json& body, const httplib::Request&, httplib::Response& res) {
    const std::string prompt = body["messages"][0]["content"];
    if (prompt.find("Translation A:") == std::string::npos) {
      res.set_content(testing::ChatBody("live output"), "application/json");
      return;
    }
    std::string a = testing::SlotText(prompt, 'A');
    std::string answer = a.empty() ? "B" : "A";
    res.set_content(testing::ChatBody("<answer>" + answer + "</answer>", 2626, 1567),
                    "application/json");
  }

  std::string config() const { return (dir_ / "live.json").string(); }

  testing::TempDir dir_;
  testing::MockChatServer server_{Handle};
};

TEST_F(LiveRunTest, GenerateJudgeScoreAgainstMock) {
  Setup(server_.base_url());
  const std::string before = TreeDigest(dir_ / "baseset");
  CliResult gen = Cli({"generate", "--config", config()});
  ASSERT_EQ(gen.code, kExitOk) << gen.err;
  EXPECT_EQ(gen.out, "generated: 70, cached: 0, failed: 0\n");
  EXPECT_EQ(Cli({"generate", "--config", config()}).out,
            "generated: 0, cached: 70, failed: 0\n");

  CliResult judge = Cli({"judge", "--config", config()});
  ASSERT_EQ(judge.code, kExitOk) << judge.err;
  EXPECT_EQ(judge.out, "judged: 1400, cached: 0, refused: 0\n");
  EXPECT_EQ(Cli({"judge", "--config", config()}).out, "judged: 0, cached: 1400, refused: 0\n");
  EXPECT_EQ(server_.hits(), 70 + 1400);

  CliResult score = Cli({"score", "--config", config(), "--json"});
  ASSERT_EQ(score.code, kExitOk) << score.err;
  ScoreReport r = ParseReport(score.out);
  EXPECT_EQ(r.per_slice.at(Slice::kOverall).matches, 1400);
  EXPECT_EQ(r.cost->total.ToCents(), "6.59");
  EXPECT_EQ(TreeDigest(dir_ / "baseset"), before);
}

TEST_F(LiveRunTest, JudgeDownMeansAllRefusedButExitZero) {
  Setup("http://127.0.0.1:1/v1");
  ASSERT_EQ(Cli({"generate", "--config", config()}).code, kExitOk);
  CliResult judge = Cli({"judge", "--config", config()});
  EXPECT_EQ(judge.code, kExitOk) << judge.err;
  EXPECT_EQ(judge.out, "judged: 1400, cached: 0, refused: 1400\n");
  EXPECT_NE(judge.err.find("warning"), std::string::npos);
  CliResult score = Cli({"score", "--config", config()});
  EXPECT_EQ(score.code, kExitOk);
  EXPECT_TRUE(ParseReport(ReadFile(dir_ / "live/report.json")).incomplete);
}

TEST(CliBinaryTest, ProcessExitCodes) {
  const char* bin = std::getenv("ANCHOREVAL_BIN");
  if (bin == nullptr) GTEST_SKIP() << "ANCHOREVAL_BIN not set";
  auto status = [&](const std::string& args) {
    int s = std::system((std::string(bin) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status("--help"), 0);
  EXPECT_EQ(status("score --config /nonexistent.json"), 2);
  EXPECT_EQ(status("cost --mean-input 2626 --mean-output 1567 --count 1400 "
                   "--input-price 0.3 --output-price 2.5"), 0);
}

}  // namespace
}  // namespace anchoreval
