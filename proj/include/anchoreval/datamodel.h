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

// Domain types of the anchored pairwise evaluation protocol and their file
// formats. Item sets and anchor manifests are single JSON documents;
// translations and judgments are JSON Lines, one record per line.

#ifndef ANCHOREVAL_DATAMODEL_H_
#define ANCHOREVAL_DATAMODEL_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "anchoreval/semver.h"
#include "json.hpp"

namespace anchoreval {

using Json = nlohmann::json;

enum class Direction { kEnToJa, kJaToEn };
enum class Tier { kEasy, kHard };

std::string_view ToString(Direction d);  // "en-ja" / "ja-en"
std::string_view ToString(Tier t);       // "easy" / "hard"
Direction ParseDirection(std::string_view s);
Tier ParseTier(std::string_view s);
std::string_view TargetLanguage(Direction d);  // "Japanese" / "English"

struct Item {
  std::string id;
  Direction direction = Direction::kEnToJa;
  Tier tier = Tier::kEasy;
  std::string source_text;

  friend bool operator==(const Item&, const Item&) = default;
};

enum class Slice {
  kOverall,
  kEnToJa,
  kJaToEn,
  kEasy,
  kHard,
  kEnToJaEasy,
  kEnToJaHard,
  kJaToEnEasy,
  kJaToEnHard,
};

inline constexpr std::array<Slice, 9> kAllSlices = {
    Slice::kOverall,    Slice::kEnToJa,     Slice::kJaToEn,
    Slice::kEasy,       Slice::kHard,       Slice::kEnToJaEasy,
    Slice::kEnToJaHard, Slice::kJaToEnEasy, Slice::kJaToEnHard};

std::string_view ToString(Slice s);  // "overall", "en-ja", "ja-en-hard", ...
Slice ParseSlice(std::string_view s);
bool SliceContains(Slice s, Direction d, Tier t);
inline bool SliceContains(Slice s, const Item& item) {
  return SliceContains(s, item.direction, item.tier);
}

struct SliceCounts {
  int en_to_ja = 0;
  int ja_to_en = 0;
  int easy = 0;
  int hard = 0;
  int en_to_ja_easy = 0;
  int en_to_ja_hard = 0;
  int ja_to_en_easy = 0;
  int ja_to_en_hard = 0;
};

// Validated, immutable set of items with an id index.
class ItemSet {
 public:
  ItemSet() = default;
  // Throws ValidationError on empty/duplicate ids or empty source text.
  ItemSet(std::string name, std::vector<Item> items);

  const std::string& name() const { return name_; }
  const std::vector<Item>& items() const { return items_; }
  size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const Item* Find(std::string_view id) const;
  SliceCounts Counts() const;

 private:
  std::string name_;
  std::vector<Item> items_;
  std::unordered_map<std::string, size_t> index_;
};

struct DecodingConfig {
  double temperature = 0.0;
  int max_output_tokens = 2048;
  std::map<std::string, std::string> extra;

  friend bool operator==(const DecodingConfig&,
                         const DecodingConfig&) = default;
};

inline constexpr std::string_view kFrozenEndpoint = "frozen";

struct ModelRef {
  std::string id;
  std::string endpoint{kFrozenEndpoint};  // URL, or "frozen"
  DecodingConfig decoding;

  friend bool operator==(const ModelRef&, const ModelRef&) = default;
};

struct JudgeConfig {
  ModelRef model;
  std::string prompt_id;  // lowercase hex SHA-256
  DecodingConfig decoding;
  int max_retries = 3;

  friend bool operator==(const JudgeConfig&, const JudgeConfig&) = default;
};

// Throws ValidationError unless temperature is exactly 0 and the rest is sane.
void ValidateJudgeConfig(const JudgeConfig& judge);

struct Translation {
  std::string item_id;
  std::string model_id;
  std::string text;  // empty means no valid answer was produced
  std::string generated_at;
  std::map<std::string, std::string> generation_meta;

  friend bool operator==(const Translation& a, const Translation& b) {
    return a.item_id == b.item_id && a.model_id == b.model_id &&
           a.text == b.text && a.generation_meta == b.generation_meta;
  }
};

// In-memory (item, model) -> Translation map.
class TranslationStore {
 public:
  // Inserts or replaces.
  void Put(Translation t);
  // Throws ValidationError if the key already exists.
  void Insert(Translation t);
  const Translation* Find(std::string_view item_id,
                          std::string_view model_id) const;
  size_t size() const { return by_key_.size(); }
  // All records ordered by (item_id, model_id).
  std::vector<const Translation*> Sorted() const;

 private:
  std::map<std::pair<std::string, std::string>, Translation> by_key_;
};

enum class Side { kLeft, kRight };
std::string_view ToString(Side s);
Side ParseSide(std::string_view s);

struct PairAssignment {
  std::string item_id;
  std::string left_model;
  std::string right_model;
  Side a_side = Side::kLeft;
  std::uint64_t seed = 0;

  // Model whose translation is shown as "Translation A" / "Translation B".
  const std::string& a_model() const {
    return a_side == Side::kLeft ? left_model : right_model;
  }
  const std::string& b_model() const {
    return a_side == Side::kLeft ? right_model : left_model;
  }
  bool Involves(std::string_view model) const {
    return left_model == model || right_model == model;
  }

  friend bool operator==(const PairAssignment&,
                         const PairAssignment&) = default;
};

// Identity of a comparison independent of side assignment.
std::string PairKey(std::string_view item_id, std::string_view left,
                    std::string_view right);
inline std::string PairKey(const PairAssignment& p) {
  return PairKey(p.item_id, p.left_model, p.right_model);
}

enum class Verdict { kA, kB, kJudgeRefused };
std::string_view ToString(Verdict v);  // "A", "B", "refused"
Verdict ParseVerdict(std::string_view s);

struct JudgeRef {
  std::string model_id;
  std::string prompt_id;

  friend bool operator==(const JudgeRef&, const JudgeRef&) = default;
};

struct Judgment {
  PairAssignment pair;
  Verdict verdict = Verdict::kJudgeRefused;
  std::optional<std::string> winner_model;
  std::string analysis_text;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  bool tokens_estimated = false;
  int attempts = 1;
  std::string refusal_reason;  // empty unless verdict is kJudgeRefused
  JudgeRef judge;
  std::string judged_at;

  bool refused() const { return verdict == Verdict::kJudgeRefused; }

  // judged_at is informational and excluded.
  friend bool operator==(const Judgment& a, const Judgment& b) {
    return a.pair == b.pair && a.verdict == b.verdict &&
           a.winner_model == b.winner_model &&
           a.analysis_text == b.analysis_text &&
           a.input_tokens == b.input_tokens &&
           a.output_tokens == b.output_tokens &&
           a.tokens_estimated == b.tokens_estimated &&
           a.attempts == b.attempts && a.refusal_reason == b.refusal_reason &&
           a.judge == b.judge;
  }
};

// Maps a slot verdict back to a model id through the pair's side assignment.
std::optional<std::string> WinnerFor(const PairAssignment& pair, Verdict v);

// Throws ValidationError when winner_model disagrees with verdict + a_side.
void ValidateJudgment(const Judgment& j);

struct AnchorSet {
  Version version;
  JudgeConfig judge;
  std::vector<ModelRef> anchors;
  TranslationStore translations;
  std::vector<Judgment> frozen_judgments;

  bool IsAnchor(std::string_view model_id) const;
  std::vector<std::string> AnchorIds() const;
};

// JSON conversions (ADL hooks for nlohmann::json).
void to_json(Json& j, const Item& v);
void from_json(const Json& j, Item& v);
void to_json(Json& j, const DecodingConfig& v);
void from_json(const Json& j, DecodingConfig& v);
void to_json(Json& j, const ModelRef& v);
void from_json(const Json& j, ModelRef& v);
void to_json(Json& j, const JudgeConfig& v);
void from_json(const Json& j, JudgeConfig& v);
void to_json(Json& j, const Translation& v);
void from_json(const Json& j, Translation& v);
void to_json(Json& j, const PairAssignment& v);
void from_json(const Json& j, PairAssignment& v);
void to_json(Json& j, const Judgment& v);
void from_json(const Json& j, Judgment& v);

// Item set file: { "name", "items": [ {id, direction, tier, source_text} ] }.
// Throws IoError, ParseError, ValidationError.
ItemSet LoadItemSet(const std::filesystem::path& path);
void SaveItemSet(const ItemSet& items, const std::filesystem::path& path);

// Anchor set directory: manifest.json, translations.jsonl, judgments.jsonl.
// Throws IoError, ParseError, VersionError, ValidationError, IncompleteError.
AnchorSet LoadAnchorSet(const std::filesystem::path& dir, const ItemSet& items);
void SaveAnchorSet(const AnchorSet& anchors, const std::filesystem::path& dir);

// ---- files ---------------------------------------------------------------

std::string ReadFile(const std::filesystem::path& path);
// Writes via a temporary file and rename.
void WriteFile(const std::filesystem::path& path, std::string_view contents);

// Parses a JSON Lines file. A final line without a terminating newline that
// fails to parse is treated as a record lost mid-write and dropped; any other
// malformed line is a ParseError.
std::vector<Json> ReadJsonLines(const std::filesystem::path& path);

// Append-only JSON Lines writer. Each record is written with one write(2)
// under an exclusive flock, so concurrent appenders (threads or processes)
// interleave at whole-record granularity. Records reach the kernel before
// Append returns.
class JsonlAppender {
 public:
  explicit JsonlAppender(const std::filesystem::path& path);
  ~JsonlAppender();
  JsonlAppender(const JsonlAppender&) = delete;
  JsonlAppender& operator=(const JsonlAppender&) = delete;

  void Append(const Json& record);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  std::mutex mu_;
};

class JudgmentLog {
 public:
  explicit JudgmentLog(const std::filesystem::path& path) : out_(path) {}
  void Append(const Judgment& j) { out_.Append(Json(j)); }
  const std::filesystem::path& path() const { return out_.path(); }

 private:
  JsonlAppender out_;
};

std::vector<Judgment> ReadJudgments(const std::filesystem::path& path);
// Empty when the file does not exist yet.
std::vector<Judgment> ReadJudgmentsIfExists(const std::filesystem::path& path);

// Later records for the same (item, model) replace earlier ones.
TranslationStore ReadTranslations(const std::filesystem::path& path);
TranslationStore ReadTranslationsIfExists(const std::filesystem::path& path);

// SHA-256 over the judgments sorted by pair, serialized without timestamps.
// Stable across record order and re-runs.
std::string CanonicalJudgmentsSha256(const std::vector<Judgment>& judgments);

std::string NowUtcIso8601();

}  // namespace anchoreval

#endif  // ANCHOREVAL_DATAMODEL_H_
