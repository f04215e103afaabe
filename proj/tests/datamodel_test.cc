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

#include "anchoreval/datamodel.h"

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <fstream>
#include <set>
#include <thread>

#include "anchoreval/error.h"
#include "anchoreval/simjudge.h"
#include "test_util.h"

namespace anchoreval {
namespace {

using testing::TempDir;

Judgment SampleJudgment(Verdict v, Side a_side) {
  Judgment j;
  j.pair = PairAssignment{"item-7", "anchor/a", "cand/x", a_side, 42};
  j.verdict = v;
  j.winner_model = WinnerFor(j.pair, v);
  j.analysis_text = "<translation_analysis>…</translation_analysis>\n<answer>A</answer>";
  j.input_tokens = 2626;
  j.output_tokens = 1567;
  j.judge = JudgeRef{"judge/m", std::string(64, 'b')};
  j.judged_at = "2025-01-01T00:00:00.000Z";
  return j;
}

TEST(ItemSetTest, BundledSampleHasProtocolSliceCounts) {
  ItemSet items = LoadItemSet(testing::SampleItemsPath());
  SliceCounts c = items.Counts();
  EXPECT_EQ(items.size(), 70u);
  EXPECT_EQ(c.en_to_ja, 34);
  EXPECT_EQ(c.ja_to_en, 36);
  EXPECT_EQ(c.easy, 30);
  EXPECT_EQ(c.hard, 40);
  EXPECT_EQ(c.en_to_ja_easy, 15);
  EXPECT_EQ(c.en_to_ja_hard, 19);
  EXPECT_EQ(c.ja_to_en_easy, 15);
  EXPECT_EQ(c.ja_to_en_hard, 21);
  EXPECT_EQ(c.en_to_ja + c.ja_to_en, static_cast<int>(items.size()));
  EXPECT_EQ(c.easy + c.hard, static_cast<int>(items.size()));
}

TEST(ItemSetTest, DuplicateIdRejected) {
  TempDir dir;
  WriteFile(dir / "items.json",
            R"({"name":"d","items":[
              {"id":"x","direction":"en-ja","tier":"easy","source_text":"a"},
              {"id":"x","direction":"ja-en","tier":"hard","source_text":"b"}]})");
  EXPECT_THROW(LoadItemSet(dir / "items.json"), ValidationError);
}

TEST(ItemSetTest, EmptySourceRejectedAndMalformedIsParseError) {
  TempDir dir;
  WriteFile(dir / "a.json",
            R"({"name":"d","items":[{"id":"x","direction":"en-ja","tier":"easy","source_text":""}]})");
  EXPECT_THROW(LoadItemSet(dir / "a.json"), ValidationError);
  WriteFile(dir / "b.json", R"({"name":"d","items":[)");
  EXPECT_THROW(LoadItemSet(dir / "b.json"), ParseError);
}

TEST(ItemSetTest, EmptyListGivesZeroCounts) {
  TempDir dir;
  WriteFile(dir / "e.json", R"({"name":"empty","items":[]})");
  ItemSet items = LoadItemSet(dir / "e.json");
  EXPECT_TRUE(items.empty());
  SliceCounts c = items.Counts();
  EXPECT_EQ(c.en_to_ja + c.ja_to_en + c.easy + c.hard, 0);
}

TEST(SliceTest, MembershipIsFunctionOfDirectionAndTier) {
  int members = 0;
  for (Direction d : {Direction::kEnToJa, Direction::kJaToEn}) {
    for (Tier t : {Tier::kEasy, Tier::kHard}) {
      int n = 0;
      for (Slice s : kAllSlices) n += SliceContains(s, d, t);
      EXPECT_EQ(n, 4);
      members += n;
    }
  }
  EXPECT_EQ(members, 16);
  for (Slice s : kAllSlices) EXPECT_EQ(ParseSlice(ToString(s)), s);
}

TEST(RoundTripTest, AllTypes) {
  Item item{"i1", Direction::kJaToEn, Tier::kHard, "石の上にも三年"};
  EXPECT_EQ(Json(item).get<Item>(), item);

  DecodingConfig d;
  d.temperature = 0.7;
  d.max_output_tokens = 512;
  d.extra = {{"top_p", "0.9"}};
  EXPECT_EQ(Json(d).get<DecodingConfig>(), d);

  ModelRef m{"org/model", "https://x/v1", d};
  EXPECT_EQ(Json(m).get<ModelRef>(), m);

  JudgeConfig jc = testing::TestJudge();
  EXPECT_EQ(Json(jc).get<JudgeConfig>(), jc);

  Translation t{"i1", "org/model", "", "2025-01-01T00:00:00Z",
                {{"status", "failed"}, {"error", "HTTP 500"}}};
  Translation back = Json(t).get<Translation>();
  EXPECT_EQ(back, t);
  EXPECT_EQ(back.generated_at, t.generated_at);

  for (Verdict v : {Verdict::kA, Verdict::kB, Verdict::kJudgeRefused}) {
    for (Side s : {Side::kLeft, Side::kRight}) {
      Judgment j = SampleJudgment(v, s);
      if (v == Verdict::kJudgeRefused) j.refusal_reason = "blocked";
      Judgment r = Json::parse(Json(j).dump()).get<Judgment>();
      EXPECT_EQ(r, j);
      EXPECT_EQ(r.judged_at, j.judged_at);
    }
  }
}

TEST(JudgmentTest, WinnerMustMatchVerdictAndSide) {
  Judgment j = SampleJudgment(Verdict::kA, Side::kRight);
  EXPECT_EQ(*j.winner_model, "cand/x");
  j.winner_model = "anchor/a";
  EXPECT_THROW(ValidateJudgment(j), ValidationError);
  j.verdict = Verdict::kJudgeRefused;
  EXPECT_THROW(ValidateJudgment(j), ValidationError);
  j.winner_model.reset();
  EXPECT_NO_THROW(ValidateJudgment(j));
}

TEST(JudgeConfigTest, TemperatureMustBeZero) {
  JudgeConfig j = testing::TestJudge();
  EXPECT_NO_THROW(ValidateJudgeConfig(j));
  j.decoding.temperature = 0.2;
  EXPECT_THROW(ValidateJudgeConfig(j), ValidationError);
}

TEST(TranslationStoreTest, InsertIsStrictPutReplaces) {
  TranslationStore s;
  s.Insert(Translation{"i", "m", "one", "", {}});
  EXPECT_THROW(s.Insert(Translation{"i", "m", "two", "", {}}), ValidationError);
  s.Put(Translation{"i", "m", "two", "", {}});
  EXPECT_EQ(s.Find("i", "m")->text, "two");
  EXPECT_EQ(s.size(), 1u);
}

class AnchorSetFileTest : public ::testing::Test {
 protected:
  void SetUp() override {
    items_ = testing::ProtocolItems();
    SimConfig cfg;
    synth_ = SynthAnchorSet(20, 6.0, items_, cfg);
    SaveAnchorSet(synth_.anchors, dir_.path());
  }
  TempDir dir_;
  ItemSet items_;
  SynthResult synth_;
};

TEST_F(AnchorSetFileTest, LoadsFullCover) {
  AnchorSet set = LoadAnchorSet(dir_.path(), items_);
  EXPECT_EQ(set.anchors.size(), 20u);
  // 20 anchors x 70 items, by enumeration.
  size_t expected = 0;
  for (const Item& item : items_.items()) {
    for (const ModelRef& m : set.anchors) {
      expected += set.translations.Find(item.id, m.id) != nullptr;
    }
  }
  EXPECT_EQ(expected, 1400u);
  EXPECT_EQ(set.translations.size(), 1400u);
  EXPECT_EQ(set.frozen_judgments.size(), 70u * 190u);
  EXPECT_EQ(set.version.ToString(), "1.0.0");
  EXPECT_EQ(set.frozen_judgments, synth_.anchors.frozen_judgments);
}

TEST_F(AnchorSetFileTest, MissingTranslationNamesItemAndAnchor) {
  std::string text = ReadFile(dir_ / "translations.jsonl");
  size_t first_nl = text.find('\n');
  Json dropped = Json::parse(text.substr(0, first_nl));
  WriteFile(dir_ / "translations.jsonl", text.substr(first_nl + 1));
  try {
    LoadAnchorSet(dir_.path(), items_);
    FAIL() << "expected IncompleteError";
  } catch (const IncompleteError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find(dropped["item_id"].get<std::string>()), std::string::npos);
    EXPECT_NE(msg.find(dropped["model_id"].get<std::string>()), std::string::npos);
  }
}

TEST_F(AnchorSetFileTest, NonSemverVersionRejected) {
  Json manifest = Json::parse(ReadFile(dir_ / "manifest.json"));
  manifest["version"] = "v1";
  WriteFile(dir_ / "manifest.json", manifest.dump());
  EXPECT_THROW(LoadAnchorSet(dir_.path(), items_), VersionError);
}

TEST_F(AnchorSetFileTest, FrozenJudgmentWithNonAnchorRejected) {
  Judgment j = synth_.anchors.frozen_judgments.front();
  j.pair.right_model = "intruder/model";
  j.winner_model = WinnerFor(j.pair, j.verdict);
  JsonlAppender(dir_ / "judgments.jsonl").Append(Json(j));
  EXPECT_THROW(LoadAnchorSet(dir_.path(), items_), ValidationError);
}

TEST(JudgmentLogTest, AppendThenReadBack) {
  TempDir dir;
  Judgment j = SampleJudgment(Verdict::kA, Side::kLeft);
  {
    JudgmentLog log(dir / "log.jsonl");
    log.Append(j);
  }
  std::vector<Judgment> back = ReadJudgments(dir / "log.jsonl");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], j);
  EXPECT_EQ(back[0].judged_at, j.judged_at);
}

TEST(JudgmentLogTest, UnwritableLocationIsIoError) {
  TempDir dir;
  WriteFile(dir / "plain-file", "x");
  // A path below a regular file cannot be created, even by root.
  EXPECT_THROW(JudgmentLog(dir / "plain-file" / "log.jsonl"), IoError);
}

TEST(JudgmentLogTest, TornFinalRecordIsDropped) {
  TempDir dir;
  Judgment j = SampleJudgment(Verdict::kB, Side::kRight);
  std::string line = Json(j).dump() + "\n";
  WriteFile(dir / "log.jsonl", line + line.substr(0, line.size() / 2));
  EXPECT_EQ(ReadJudgments(dir / "log.jsonl").size(), 1u);
  // A torn record in the middle is corruption, not a crash artifact.
  WriteFile(dir / "bad.jsonl", line.substr(0, 10) + "\n" + line);
  EXPECT_THROW(ReadJudgments(dir / "bad.jsonl"), ParseError);
}

// Two processes, each with two threads and its own appender, write large
// records to one file. Every line must parse and every record must appear
// exactly once.
TEST(JudgmentLogTest, ConcurrentWritersInterleaveWholeRecords) {
  TempDir dir;
  const auto path = dir / "log.jsonl";
  constexpr int kPerThread = 300;
  const std::string big(8192, 'x');  // well above PIPE_BUF

  auto write_records = [&](const std::string& tag) {
    JudgmentLog log(path);
    std::vector<std::thread> threads;
    for (int t = 0; t < 2; ++t) {
      threads.emplace_back([&, t] {
        for (int i = 0; i < kPerThread; ++i) {
          Judgment j = SampleJudgment(Verdict::kA, Side::kLeft);
          j.pair.item_id = tag + "-" + std::to_string(t) + "-" + std::to_string(i);
          j.analysis_text = big;
          log.Append(j);
        }
      });
    }
    for (auto& th : threads) th.join();
  };

  pid_t child = ::fork();
  ASSERT_GE(child, 0);
  if (child == 0) {
    write_records("child");
    ::_exit(0);
  }
  write_records("parent");
  int status = 0;
  ::waitpid(child, &status, 0);
  ASSERT_TRUE(WIFEXITED(status));
  ASSERT_EQ(WEXITSTATUS(status), 0);

  std::vector<Judgment> all = ReadJudgments(path);
  ASSERT_EQ(all.size(), 4u * kPerThread);
  std::set<std::string> ids;
  for (const Judgment& j : all) {
    EXPECT_EQ(j.analysis_text.size(), big.size());
    ids.insert(j.pair.item_id);
  }
  EXPECT_EQ(ids.size(), 4u * kPerThread);
}

TEST(CanonicalHashTest, IgnoresOrderAndTimestamps) {
  Judgment a = SampleJudgment(Verdict::kA, Side::kLeft);
  Judgment b = SampleJudgment(Verdict::kB, Side::kRight);
  b.pair.item_id = "item-8";
  b.winner_model = WinnerFor(b.pair, b.verdict);
  std::string h1 = CanonicalJudgmentsSha256({a, b});
  b.judged_at = "2030-06-01T12:00:00.000Z";
  EXPECT_EQ(CanonicalJudgmentsSha256({b, a}), h1);
  b.analysis_text += ".";
  EXPECT_NE(CanonicalJudgmentsSha256({b, a}), h1);
}

}  // namespace
}  // namespace anchoreval
