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

#include "anchoreval/judge.h"

#include <atomic>
#include <set>
#include <unordered_map>
#include <vector>

#include "anchoreval/error.h"
#include "anchoreval/prompts.h"

namespace anchoreval {
namespace {

std::string_view TrimAscii(std::string_view s) {
  const char* ws = " \t\r\n\f\v";
  size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Contents of the last <tag>...</tag> in raw.
std::optional<std::string_view> LastTagged(std::string_view raw,
                                           std::string_view tag) {
  const std::string open = "<" + std::string(tag) + ">";
  const std::string close = "</" + std::string(tag) + ">";
  size_t end = raw.rfind(close);
  if (end == std::string_view::npos) return std::nullopt;
  size_t start = raw.rfind(open, end);
  if (start == std::string_view::npos) return std::nullopt;
  start += open.size();
  return raw.substr(start, end - start);
}

}  // namespace

ParsedAnswer ParseAnswer(std::string_view raw) {
  auto body = LastTagged(raw, "answer");
  if (!body) return ParsedAnswer::kMalformed;
  std::string_view v = TrimAscii(*body);
  if (v == "A") return ParsedAnswer::kA;
  if (v == "B") return ParsedAnswer::kB;
  return ParsedAnswer::kMalformed;
}

std::int64_t EstimateTokens(std::string_view text) {
  return static_cast<std::int64_t>((text.size() + 3) / 4);
}

Judgment JudgePair(const PairAssignment& pair, const Item& item,
                   const TranslationStore& translations,
                   const JudgeConfig& judge, ChatClient& client,
                   const JudgeCallOptions& options) {
  const std::string prompt =
      RenderComparePrompt(MakeComparePromptInput(item, pair, translations));
  ChatRequest request{judge.model.id, prompt, judge.decoding};

  Judgment j;
  j.pair = pair;
  j.judge = JudgeRef{judge.model.id, judge.prompt_id};
  j.attempts = 0;
  ParsedAnswer answer = ParsedAnswer::kMalformed;
  std::string refusal;
  for (int call = 0; call <= judge.max_retries; ++call) {
    ChatResponse r = client.Complete(request);
    ++j.attempts;
    if (r.prompt_tokens && r.completion_tokens) {
      j.input_tokens += *r.prompt_tokens;
      j.output_tokens += *r.completion_tokens;
    } else {
      j.input_tokens += r.prompt_tokens.value_or(EstimateTokens(prompt));
      j.output_tokens += r.completion_tokens.value_or(EstimateTokens(r.text));
      j.tokens_estimated = true;
    }
    if (r.status == ChatStatus::kBlocked) {
      refusal = "blocked: " + r.error;
      j.analysis_text = r.text;
      break;
    }
    if (r.status == ChatStatus::kFailed) {
      refusal = "endpoint failure: " + r.error;
      j.analysis_text = r.text;
      break;
    }
    j.analysis_text = r.text;
    answer = ParseAnswer(r.text);
    if (answer != ParsedAnswer::kMalformed) break;
    refusal = "malformed answer after " + std::to_string(call + 1) + " call(s)";
  }

  if (answer == ParsedAnswer::kA || answer == ParsedAnswer::kB) {
    j.verdict = answer == ParsedAnswer::kA ? Verdict::kA : Verdict::kB;
    j.winner_model = WinnerFor(pair, j.verdict);
  } else {
    j.verdict = Verdict::kJudgeRefused;
    j.winner_model.reset();
    j.refusal_reason = refusal;
  }
  j.judged_at = options.clock ? options.clock() : NowUtcIso8601();
  return j;
}

JudgeSummary JudgeAll(const PairPlan& plan, const ItemSet& items,
                      const TranslationStore& translations,
                      const JudgeConfig& judge, ChatClient& client,
                      const std::filesystem::path& log_path,
                      const JudgeAllOptions& options) {
  ValidateJudgeConfig(judge);
  std::unordered_map<std::string, const PairAssignment*> planned;
  for (const PairAssignment& p : plan.pairs) planned.emplace(PairKey(p), &p);

  const JudgeRef ref{judge.model.id, judge.prompt_id};
  std::set<std::string> done;
  for (const Judgment& j : ReadJudgmentsIfExists(log_path)) {
    const std::string key = PairKey(j.pair);
    auto it = planned.find(key);
    if (it == planned.end()) {
      throw ConflictError("log '" + log_path.string() + "' holds pair (" +
                          j.pair.item_id + ", " + j.pair.left_model + ", " +
                          j.pair.right_model + ") which is not in the plan");
    }
    if (!(j.pair == *it->second)) {
      throw ConflictError("logged side assignment for (" + j.pair.item_id +
                          ", " + j.pair.left_model + ", " +
                          j.pair.right_model + ") differs from the plan");
    }
    if (!(j.judge == ref)) {
      throw ConflictError("log '" + log_path.string() +
                          "' was written by a different judge or prompt");
    }
    done.insert(key);
  }

  std::vector<std::pair<const PairAssignment*, const Item*>> todo;
  for (const PairAssignment& p : plan.pairs) {
    if (done.count(PairKey(p))) continue;
    const Item* item = items.Find(p.item_id);
    if (item == nullptr) {
      throw PreconditionError("plan references unknown item '" + p.item_id +
                              "'");
    }
    if (!translations.Find(p.item_id, p.left_model) ||
        !translations.Find(p.item_id, p.right_model)) {
      throw PreconditionError("missing translation for item '" + p.item_id +
                              "' (" + p.left_model + " / " + p.right_model +
                              ")");
    }
    todo.emplace_back(&p, item);
  }

  JudgeSummary summary;
  summary.cached = static_cast<int>(plan.pairs.size() - todo.size());
  if (todo.empty()) return summary;

  JudgmentLog log(log_path);
  std::atomic<int> judged{0}, refused{0};
  JudgeCallOptions call_options{options.clock};
  RunBounded(todo.size(), options.max_concurrency, [&](size_t i) {
    Judgment j = JudgePair(*todo[i].first, *todo[i].second, translations,
                           judge, client, call_options);
    log.Append(j);
    ++judged;
    if (j.refused()) ++refused;
  });
  summary.judged = judged.load();
  summary.refused = refused.load();
  return summary;
}

std::optional<RubricResult> ParseRubricOutput(std::string_view raw) {
  auto score = LastTagged(raw, "score");
  auto correct = LastTagged(raw, "correct");
  if (!score || !correct) return std::nullopt;
  std::string_view s = TrimAscii(*score);
  std::string_view c = TrimAscii(*correct);
  if (s.size() != 1 || s[0] < '1' || s[0] > '5') return std::nullopt;
  if (c != "0" && c != "1") return std::nullopt;
  RubricResult r;
  r.score = s[0] - '0';
  r.perfect = c == "1";
  if (auto just = LastTagged(raw, "justification")) {
    r.justification = std::string(TrimAscii(*just));
  }
  if (r.perfect && r.score < 5) {
    r.perfect = false;
    r.perfect_downgraded = true;
  }
  return r;
}

RubricResult RubricJudge(const Item& item, const Translation& translation,
                         const Translation& reference,
                         const JudgeConfig& judge, ChatClient& client) {
  if (reference.text.empty()) {
    throw PreconditionError("rubric judging needs a non-empty reference for '" +
                            item.id + "'");
  }
  ChatRequest request{
      judge.model.id,
      RenderRubricPrompt(item.source_text, translation.text, reference.text),
      judge.decoding};
  std::string last_error;
  for (int call = 0; call <= judge.max_retries; ++call) {
    ChatResponse r = client.Complete(request);
    if (r.status != ChatStatus::kOk) {
      last_error = r.error;
      continue;
    }
    if (auto parsed = ParseRubricOutput(r.text)) return *parsed;
    last_error = "unparseable rubric output";
  }
  throw MalformedJudgeOutput("rubric judge failed for item '" + item.id +
                             "' after " + std::to_string(judge.max_retries + 1) +
                             " call(s): " + last_error);
}

}  // namespace anchoreval
