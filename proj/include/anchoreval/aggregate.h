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

#ifndef ANCHOREVAL_AGGREGATE_H_
#define ANCHOREVAL_AGGREGATE_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anchoreval/bradley_terry.h"
#include "anchoreval/costmodel.h"
#include "anchoreval/datamodel.h"
#include "anchoreval/judge.h"

namespace anchoreval {

inline constexpr std::string_view kAggregationVersion = "anchoreval-bt-mm/1";

// Models are the anchors in the given order followed by the candidate.
// Counts only non-refused judgments on items inside `slice`. The candidate is
// taken from `candidate_id` when set, else inferred from the judgments.
// Throws MixedCandidatesError when candidate judgments name more than one
// non-anchor model, ValidationError for unknown items or judgments that do
// not pair the candidate with an anchor.
MatchMatrix BuildMatchMatrix(const std::vector<std::string>& anchor_ids,
                             const std::vector<Judgment>& frozen,
                             const std::vector<Judgment>& candidate_judgments,
                             Slice slice, const ItemSet& items,
                             const std::optional<std::string>& candidate_id =
                                 std::nullopt);

struct SliceScore {
  std::int64_t matches = 0;
  std::int64_t wins = 0;
  std::int64_t excluded = 0;  // refused candidate judgments in the slice
  std::optional<double> win_rate;
  std::optional<double> theta;  // centered
  std::optional<double> lt;
  std::map<std::string, double> anchor_thetas;  // centered
  bool converged = false;
  int iterations = 0;
};

// Settings and provenance echoed into the report.
struct ReproMeta {
  std::string baseset_version;
  std::string baseset_path;
  std::string judge_model;
  std::string judge_endpoint;
  std::string judge_prompt_id;
  std::string judge_prompt_path;
  DecodingConfig judge_decoding;
  std::string candidate_model;
  std::string candidate_endpoint;
  DecodingConfig candidate_decoding;
  std::string candidate_prompt_id;
  std::vector<std::string> filtering_notes;
  std::string candidate_log_path;
  std::string candidate_log_sha256;
  std::string frozen_log_sha256;
  std::uint64_t pair_seed = 0;
};

struct AggregationInfo {
  std::string method{kAggregationVersion};
  double prior_strength = kDefaultPriorStrength;
  double tol = kDefaultTolerance;
  int max_iterations = kDefaultMaxIterations;
};

struct ScoreReport {
  std::string candidate;
  std::string baseset_version;
  JudgeConfig judge;
  std::map<Slice, SliceScore> per_slice;
  std::optional<TokenStats> token_stats;
  std::optional<CostEstimate> cost;
  std::optional<PriceSheet> prices;
  bool incomplete = false;
  std::vector<std::string> notes;
  ReproMeta checklist;
  AggregationInfo aggregation;
};

struct ScoreOptions {
  FitOptions fit;
  std::optional<PriceSheet> prices;
  // Provenance fields not derivable from the inputs (paths, endpoints).
  ReproMeta provenance;
};

// Fits each of the nine slices independently on anchors + candidate.
// Partial or empty judgment sets produce reduced or zero counts and set
// `incomplete`. Throws ValidationError on duplicate candidate pairs.
ScoreReport ScoreCandidate(const AnchorSet& baseset,
                           const std::string& candidate,
                           const std::vector<Judgment>& candidate_judgments,
                           const ItemSet& items,
                           const ScoreOptions& options = {});

void to_json(Json& j, const SliceScore& v);
void from_json(const Json& j, SliceScore& v);
void to_json(Json& j, const ReproMeta& v);
void from_json(const Json& j, ReproMeta& v);
void to_json(Json& j, const ScoreReport& v);
void from_json(const Json& j, ScoreReport& v);

// Canonical report.json text (stable key order, trailing newline).
std::string SerializeReport(const ScoreReport& report);
ScoreReport ParseReport(std::string_view text);

// Labels of the provenance block in report.md, in order.
const std::vector<std::string>& ChecklistLabels();

std::string RenderReportMarkdown(const ScoreReport& report);

struct RubricSummary {
  int count = 0;
  double mean = 0.0;
  double median = 0.0;
  std::array<double, 5> pct{};  // pct[k] = share of score k + 1, in percent
  double useful_pct = 0.0;      // score >= 3
  double perfect_pct = 0.0;     // perfect flag set
};

// Throws EmptyError for an empty list.
RubricSummary RubricStats(const std::vector<RubricResult>& results);

}  // namespace anchoreval

#endif  // ANCHOREVAL_AGGREGATE_H_
