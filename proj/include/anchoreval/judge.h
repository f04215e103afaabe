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

#ifndef ANCHOREVAL_JUDGE_H_
#define ANCHOREVAL_JUDGE_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "anchoreval/datamodel.h"
#include "anchoreval/endpoint.h"
#include "anchoreval/pairing.h"

namespace anchoreval {

enum class ParsedAnswer { kA, kB, kMalformed };

// Takes the last <answer>...</answer> block, trims ASCII whitespace and
// accepts exactly "A" or "B".
ParsedAnswer ParseAnswer(std::string_view raw);

// ceil(bytes / 4).
std::int64_t EstimateTokens(std::string_view text);

struct JudgeCallOptions {
  std::function<std::string()> clock;  // defaults to the wall clock
};

// One pairwise judgment. Endpoint failures and persistent format violations
// become kJudgeRefused. Throws PreconditionError when a translation is
// missing from the store.
Judgment JudgePair(const PairAssignment& pair, const Item& item,
                   const TranslationStore& translations,
                   const JudgeConfig& judge, ChatClient& client,
                   const JudgeCallOptions& options = {});

struct JudgeAllOptions {
  int max_concurrency = 1;
  std::function<std::string()> clock;
};

struct JudgeSummary {
  int judged = 0;   // new judgments written by this call
  int cached = 0;   // pairs already in the log
  int refused = 0;  // new judgments that are refusals
};

// Judges every plan pair missing from the log at `log_path`. Throws
// ConflictError when a logged judgment disagrees with the plan (side, seed
// or judge) and PreconditionError for unknown items or missing translations.
JudgeSummary JudgeAll(const PairPlan& plan, const ItemSet& items,
                      const TranslationStore& translations,
                      const JudgeConfig& judge, ChatClient& client,
                      const std::filesystem::path& log_path,
                      const JudgeAllOptions& options = {});

struct RubricResult {
  int score = 0;  // 1..5
  bool perfect = false;
  std::string justification;
  // Set when the judge marked correct=1 on a score below 5.
  bool perfect_downgraded = false;
};

// nullopt when the output does not follow the rubric format.
std::optional<RubricResult> ParseRubricOutput(std::string_view raw);

// Throws PreconditionError for an empty reference and MalformedJudgeOutput
// after judge.max_retries re-calls still fail to parse.
RubricResult RubricJudge(const Item& item, const Translation& translation,
                         const Translation& reference,
                         const JudgeConfig& judge, ChatClient& client);

}  // namespace anchoreval

#endif  // ANCHOREVAL_JUDGE_H_
