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

#include "anchoreval/aggregate.h"

#include <gtest/gtest.h>

#include "anchoreval/error.h"
#include "sim_world.h"
#include "test_util.h"

namespace anchoreval {
namespace {

using testing::SimWorld;

class AggregateTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    world_ = new SimWorld(testing::ProtocolItems(), 20, 6.0);
  }
  static void TearDownTestSuite() {
    delete world_;
    world_ = nullptr;
  }
  static SimWorld* world_;
};
SimWorld* AggregateTest::world_ = nullptr;

Judgment Refuse(Judgment j) {
  j.verdict = Verdict::kJudgeRefused;
  j.winner_model.reset();
  j.refusal_reason = "blocked: test";
  return j;
}

TEST_F(AggregateTest, FullRunCounts) {
  auto js = world_->Judge("cand/full", 0.5);
  ScoreReport r = ScoreCandidate(world_->anchors(), "cand/full", js, world_->items);
  EXPECT_FALSE(r.incomplete);
  EXPECT_EQ(r.per_slice.at(Slice::kOverall).matches, 1400);
  EXPECT_EQ(r.per_slice.at(Slice::kEnToJa).matches, 680);
  EXPECT_EQ(r.per_slice.at(Slice::kJaToEn).matches, 720);
  EXPECT_EQ(r.per_slice.at(Slice::kEasy).matches, 600);
  EXPECT_EQ(r.per_slice.at(Slice::kHard).matches, 800);
}

TEST_F(AggregateTest, SliceAlgebra) {
  auto js = world_->Judge("cand/alg", 1.0);
  ScoreReport r = ScoreCandidate(world_->anchors(), "cand/alg", js, world_->items);
  auto m = [&](Slice s) { return r.per_slice.at(s).matches; };
  auto w = [&](Slice s) { return r.per_slice.at(s).wins; };
  EXPECT_EQ(m(Slice::kEnToJa) + m(Slice::kJaToEn), m(Slice::kOverall));
  EXPECT_EQ(m(Slice::kEasy) + m(Slice::kHard), m(Slice::kOverall));
  EXPECT_EQ(m(Slice::kEnToJaEasy) + m(Slice::kEnToJaHard), m(Slice::kEnToJa));
  EXPECT_EQ(m(Slice::kJaToEnEasy) + m(Slice::kJaToEnHard), m(Slice::kJaToEn));
  EXPECT_EQ(w(Slice::kEnToJa) + w(Slice::kJaToEn), w(Slice::kOverall));
  EXPECT_EQ(w(Slice::kEnToJaEasy) + w(Slice::kJaToEnEasy), w(Slice::kEasy));
  // Oracle: count wins directly from the judgments.
  std::int64_t wins = 0;
  for (const Judgment& j : js) wins += j.winner_model == "cand/alg";
  EXPECT_EQ(w(Slice::kOverall), wins);
}

TEST_F(AggregateTest, RefusalsShrinkMatchesWithoutAddingLosses) {
  auto js = world_->Judge("cand/ref", 0.0);
  ScoreReport before = ScoreCandidate(world_->anchors(), "cand/ref", js, world_->items);
  const std::vector<size_t> hits = {3, 500, 1201};
  std::int64_t refused_wins = 0, refused_enja = 0;
  for (size_t i : hits) {
    refused_wins += js[i].winner_model == "cand/ref";
    refused_enja += world_->items.Find(js[i].pair.item_id)->direction == Direction::kEnToJa;
    js[i] = Refuse(js[i]);
  }
  ScoreReport after = ScoreCandidate(world_->anchors(), "cand/ref", js, world_->items);
  const SliceScore& b = before.per_slice.at(Slice::kOverall);
  const SliceScore& a = after.per_slice.at(Slice::kOverall);
  EXPECT_EQ(a.matches, 1397);
  EXPECT_EQ(b.matches - a.matches, 3);
  EXPECT_EQ(a.excluded, 3);
  EXPECT_EQ(a.wins, b.wins - refused_wins);
  EXPECT_EQ(a.matches - a.wins, (b.matches - b.wins) - (3 - refused_wins));
  EXPECT_EQ(after.per_slice.at(Slice::kEnToJa).matches, 680 - refused_enja);
  EXPECT_FALSE(after.incomplete);
  EXPECT_EQ(after.notes.size(), 1u);
}

TEST_F(AggregateTest, MixedCandidatesRejected) {
  auto a = world_->Judge("cand/a", 0.0);
  auto b = world_->Judge("cand/b", 0.0);
  a.push_back(b.front());
  EXPECT_THROW(ScoreCandidate(world_->anchors(), "cand/a", a, world_->items),
               MixedCandidatesError);
}

TEST_F(AggregateTest, DuplicatePairRejected) {
  auto a = world_->Judge("cand/dup", 0.0);
  a.push_back(a.front());
  EXPECT_THROW(ScoreCandidate(world_->anchors(), "cand/dup", a, world_->items),
               ValidationError);
}

TEST_F(AggregateTest, StrongCandidateRanksFirst) {
  auto js = world_->Judge("cand/strong", 6.0);
  ScoreReport r = ScoreCandidate(world_->anchors(), "cand/strong", js, world_->items);
  const SliceScore& s = r.per_slice.at(Slice::kOverall);
  for (const auto& [anchor, theta] : s.anchor_thetas) EXPECT_GT(*s.theta, theta) << anchor;
  EXPECT_GT(*s.lt, 9.0);
  EXPECT_LT(*s.lt, 10.0);
}

TEST_F(AggregateTest, MidCandidateWinRateWithinBinomialInterval) {
  // theta 0 sits in the middle of a symmetric pool: its expected win rate is
  // the mean of sigma(0 - theta_k) over anchors.
  auto js = world_->Judge("cand/mid", 0.0);
  ScoreReport r = ScoreCandidate(world_->anchors(), "cand/mid", js, world_->items);
  double p = 0.0;
  for (const auto& [id, t] : world_->synth.true_theta) p += Sigmoid(-t);
  p /= static_cast<double>(world_->synth.true_theta.size());
  auto [lo, hi] = testing::BinomialInterval(1400, p, 1e-4);
  const SliceScore& s = r.per_slice.at(Slice::kOverall);
  EXPECT_GE(s.wins, lo);
  EXPECT_LE(s.wins, hi);
  EXPECT_NEAR(*s.lt, 5.0, 1.0);
}

TEST_F(AggregateTest, ZeroJudgmentsIsIncompleteNotACrash) {
  ScoreReport r = ScoreCandidate(world_->anchors(), "cand/none", {}, world_->items);
  EXPECT_TRUE(r.incomplete);
  for (Slice s : kAllSlices) {
    EXPECT_EQ(r.per_slice.at(s).matches, 0);
    EXPECT_FALSE(r.per_slice.at(s).lt.has_value());
  }
  EXPECT_FALSE(r.token_stats.has_value());
  EXPECT_NO_THROW(RenderReportMarkdown(r));
}

TEST_F(AggregateTest, PartialLogIsFlagged) {
  auto js = world_->Judge("cand/part", 0.0);
  js.resize(700);
  ScoreReport r = ScoreCandidate(world_->anchors(), "cand/part", js, world_->items);
  EXPECT_TRUE(r.incomplete);
  EXPECT_EQ(r.per_slice.at(Slice::kOverall).matches, 700);
}

TEST_F(AggregateTest, ScoreIndependentOfOtherCandidates) {
  auto x = world_->Judge("cand/x", 1.5);
  const std::string alone =
      SerializeReport(ScoreCandidate(world_->anchors(), "cand/x", x, world_->items));
  for (int i = 0; i < 5; ++i) {
    std::string other = "cand/o" + std::to_string(i);
    auto o = world_->Judge(other, -1.0 + i);
    ScoreCandidate(world_->anchors(), other, o, world_->items);
  }
  EXPECT_EQ(SerializeReport(ScoreCandidate(world_->anchors(), "cand/x", x, world_->items)),
            alone);
}

TEST_F(AggregateTest, ReportRoundTripAndMarkdown) {
  auto js = world_->Judge("cand/rt", 0.7);
  ScoreOptions opt;
  opt.prices = PriceSheet::FromDecimal(0.30, 2.50);
  opt.provenance.baseset_path = "bases/v1";
  opt.provenance.pair_seed = 42;
  ScoreReport r = ScoreCandidate(world_->anchors(), "cand/rt", js, world_->items, opt);
  std::string text = SerializeReport(r);
  EXPECT_EQ(SerializeReport(ParseReport(text)), text);
  ASSERT_TRUE(r.cost.has_value());
  EXPECT_EQ(r.cost->total.ToCents(), "6.59");

  std::string md = RenderReportMarkdown(r);
  for (const std::string& label : ChecklistLabels()) {
    EXPECT_NE(md.find(label), std::string::npos) << label;
  }
  for (const char* col : {"Easy LT", "Hard LT", "Overall LT", "Win Rate", "EN→JA", "JA→EN"}) {
    EXPECT_NE(md.find(col), std::string::npos) << col;
  }
  EXPECT_NE(md.find(r.checklist.candidate_log_sha256), std::string::npos);
}

TEST(MatchMatrixTest, CandidateIsLastAndFrozenAnchorsOnly) {
  ItemSet items = testing::MakeItems(1, 0, 0, 0);
  const std::string item = items.items()[0].id;
  Judgment f;
  f.pair = AssignPair(1, item, "a1", "a2");
  f.verdict = Verdict::kA;
  f.winner_model = WinnerFor(f.pair, f.verdict);
  Judgment c;
  c.pair = AssignPair(1, item, "a1", "cand");
  c.verdict = Verdict::kB;
  c.winner_model = WinnerFor(c.pair, c.verdict);
  MatchMatrix m = BuildMatchMatrix({"a1", "a2"}, {f}, {c}, Slice::kOverall, items);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m.models()[2], "cand");
  EXPECT_EQ(m.TotalMatches(2), 1);
  EXPECT_EQ(m.matches(0, 1), 1);

  Judgment bad = c;
  bad.pair = AssignPair(1, item, "x", "y");
  bad.winner_model = WinnerFor(bad.pair, bad.verdict);
  EXPECT_THROW(BuildMatchMatrix({"a1", "a2"}, {f}, {bad}, Slice::kOverall, items),
               ValidationError);
  EXPECT_THROW(BuildMatchMatrix({"a1", "a2"}, {f}, {c}, Slice::kOverall, items,
                                std::string("a1")),
               ConflictError);
}

TEST(RubricStatsTest, ReferenceDistribution) {
  // 200 samples: 25 twos, 37 threes, 59 fours, 79 fives (all fives perfect).
  std::vector<RubricResult> rs;
  auto add = [&](int score, int n, bool perfect) {
    for (int i = 0; i < n; ++i) rs.push_back(RubricResult{score, perfect, "", false});
  };
  add(2, 25, false);
  add(3, 37, false);
  add(4, 59, false);
  add(5, 79, true);
  ASSERT_EQ(rs.size(), 200u);
  // Oracle in exact integer arithmetic: sum = 792, useful = 175, perfect = 79.
  RubricSummary s = RubricStats(rs);
  EXPECT_EQ(s.mean, 3.96);
  EXPECT_EQ(s.useful_pct, 87.5);
  EXPECT_EQ(s.perfect_pct, 39.5);
  EXPECT_EQ(s.pct[1], 12.5);
  EXPECT_EQ(s.pct[2], 18.5);
  EXPECT_EQ(s.pct[3], 29.5);
  EXPECT_EQ(s.pct[4], 39.5);
  EXPECT_EQ(s.median, 4.0);
  EXPECT_THROW(RubricStats({}), EmptyError);
}

}  // namespace
}  // namespace anchoreval
