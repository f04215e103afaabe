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

#include "anchoreval/inspect.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "anchoreval/error.h"
#include "sim_world.h"
#include "test_util.h"

namespace anchoreval {
namespace {

InspectData SmallRun() {
  testing::SimWorld world(testing::MakeItems(1, 1, 1, 0), 3, 2.0);
  world.cfg.input_tokens = 10;
  world.cfg.output_tokens = 4;
  InspectData data;
  data.judgments = world.Judge("cand/x", 0.5, {"eh1000"});
  data.translations = world.Store("cand/x", {"eh1000"});
  data.items = world.items;
  return data;
}

TEST(InspectTest, FilterRefusals) {
  InspectData data = SmallRun();
  for (size_t i : {0u, 4u, 7u}) {
    Judgment& j = data.judgments[i];
    j.verdict = Verdict::kJudgeRefused;
    j.winner_model.reset();
    j.refusal_reason = "blocked: test";
  }
  EXPECT_EQ(SelectJudgments(data, ParseFilter({"verdict=JudgeRefused"})).size(), 3u);
  EXPECT_EQ(SelectJudgments(data, ParseFilter({"verdict=refused"})).size(), 3u);
  EXPECT_EQ(SelectJudgments(data, {}).size(), data.judgments.size());
}

TEST(InspectTest, FiltersCompose) {
  InspectData data = SmallRun();
  const std::string anchor = SynthAnchorId(0, 3);
  auto rows = SelectJudgments(data, ParseFilter({"anchor=" + anchor, "slice=en-ja"}));
  EXPECT_EQ(rows.size(), 2u);
  for (size_t i : rows) EXPECT_TRUE(data.judgments[i].pair.Involves(anchor));
  EXPECT_EQ(SelectJudgments(data, ParseFilter({"item=ee1000"})).size(), 3u);
  EXPECT_THROW(ParseFilter({"colour=red"}), ConfigError);
  EXPECT_THROW(ParseFilter({"verdict=C"}), ConfigError);
  EXPECT_THROW(ParseFilter({"nonsense"}), ConfigError);
}

TEST(InspectTest, DetailShowsSlotsAsJudged) {
  InspectData data = SmallRun();
  for (size_t i = 0; i < data.judgments.size(); ++i) {
    const PairAssignment& p = data.judgments[i].pair;
    std::string detail = RenderDetail(data, i);
    const Translation* a = data.translations.Find(p.item_id, p.a_model());
    std::string a_text = a->text.empty() ? "(empty)" : a->text;
    EXPECT_NE(detail.find("Translation A [" + p.a_model() + "]:\n" + a_text + "\n"),
              std::string::npos);
    EXPECT_NE(detail.find("Slots: A = " + p.a_model()), std::string::npos);
    std::string row = RenderRow(data, i);
    EXPECT_NE(row.find("A=" + p.a_model()), std::string::npos);
  }
}

TEST(InspectTest, DumpMatchesGolden) {
  InspectData data = SmallRun();
  std::string dump = DumpJudgments(data, ParseFilter({"item=eh1000"}));
  const auto golden = testing::SourceDir() / "tests" / "golden" / "inspect_dump_eh1000.txt";
  if (std::getenv("ANCHOREVAL_UPDATE_GOLDEN")) WriteFile(golden, dump);
  EXPECT_EQ(dump, ReadFile(golden));
}

TEST(InspectTest, ReplSession) {
  InspectData data = SmallRun();
  std::istringstream in("list\nfilter item=ee1000\nnext\nnext\nprev\nshow 9\nbogus\nclear\nquit\n");
  std::ostringstream out;
  RunInspector(data, in, out);
  std::string s = out.str();
  EXPECT_NE(s.find("9 judgment(s) loaded"), std::string::npos);
  EXPECT_NE(s.find("3 row(s) match"), std::string::npos);
  EXPECT_NE(s.find("Item: ee1000"), std::string::npos);
  EXPECT_NE(s.find("error: row out of range"), std::string::npos);
  EXPECT_NE(s.find("unknown command 'bogus'"), std::string::npos);
}

}  // namespace
}  // namespace anchoreval
