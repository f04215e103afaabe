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

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "anchoreval/error.h"
#include "anchoreval/hashing.h"

namespace anchoreval {

namespace fs = std::filesystem;

// ---- enums -----------------------------------------------------------------

std::string_view ToString(Direction d) {
  return d == Direction::kEnToJa ? "en-ja" : "ja-en";
}

std::string_view ToString(Tier t) { return t == Tier::kEasy ? "easy" : "hard"; }

Direction ParseDirection(std::string_view s) {
  if (s == "en-ja") return Direction::kEnToJa;
  if (s == "ja-en") return Direction::kJaToEn;
  throw ParseError("unknown direction '" + std::string(s) + "'");
}

Tier ParseTier(std::string_view s) {
  if (s == "easy") return Tier::kEasy;
  if (s == "hard") return Tier::kHard;
  throw ParseError("unknown tier '" + std::string(s) + "'");
}

std::string_view TargetLanguage(Direction d) {
  return d == Direction::kEnToJa ? "Japanese" : "English";
}

std::string_view ToString(Slice s) {
  switch (s) {
    case Slice::kOverall:
      return "overall";
    case Slice::kEnToJa:
      return "en-ja";
    case Slice::kJaToEn:
      return "ja-en";
    case Slice::kEasy:
      return "easy";
    case Slice::kHard:
      return "hard";
    case Slice::kEnToJaEasy:
      return "en-ja-easy";
    case Slice::kEnToJaHard:
      return "en-ja-hard";
    case Slice::kJaToEnEasy:
      return "ja-en-easy";
    case Slice::kJaToEnHard:
      return "ja-en-hard";
  }
  return "?";
}

Slice ParseSlice(std::string_view s) {
  for (Slice slice : kAllSlices) {
    if (ToString(slice) == s) return slice;
  }
  throw ParseError("unknown slice '" + std::string(s) + "'");
}

bool SliceContains(Slice s, Direction d, Tier t) {
  const bool enja = d == Direction::kEnToJa;
  const bool easy = t == Tier::kEasy;
  switch (s) {
    case Slice::kOverall:
      return true;
    case Slice::kEnToJa:
      return enja;
    case Slice::kJaToEn:
      return !enja;
    case Slice::kEasy:
      return easy;
    case Slice::kHard:
      return !easy;
    case Slice::kEnToJaEasy:
      return enja && easy;
    case Slice::kEnToJaHard:
      return enja && !easy;
    case Slice::kJaToEnEasy:
      return !enja && easy;
    case Slice::kJaToEnHard:
      return !enja && !easy;
  }
  return false;
}

std::string_view ToString(Side s) { return s == Side::kLeft ? "left" : "right"; }

Side ParseSide(std::string_view s) {
  if (s == "left") return Side::kLeft;
  if (s == "right") return Side::kRight;
  throw ParseError("unknown side '" + std::string(s) + "'");
}

std::string_view ToString(Verdict v) {
  switch (v) {
    case Verdict::kA:
      return "A";
    case Verdict::kB:
      return "B";
    case Verdict::kJudgeRefused:
      return "refused";
  }
  return "?";
}

Verdict ParseVerdict(std::string_view s) {
  if (s == "A") return Verdict::kA;
  if (s == "B") return Verdict::kB;
  if (s == "refused") return Verdict::kJudgeRefused;
  throw ParseError("unknown verdict '" + std::string(s) + "'");
}

// ---- ItemSet ---------------------------------------------------------------

ItemSet::ItemSet(std::string name, std::vector<Item> items)
    : name_(std::move(name)), items_(std::move(items)) {
  for (size_t i = 0; i < items_.size(); ++i) {
    const Item& item = items_[i];
    if (item.id.empty()) {
      throw ValidationError("item #" + std::to_string(i) + " has an empty id");
    }
    if (item.source_text.empty()) {
      throw ValidationError("item '" + item.id + "' has empty source_text");
    }
    if (!index_.emplace(item.id, i).second) {
      throw ValidationError("duplicate item id '" + item.id + "'");
    }
  }
}

const Item* ItemSet::Find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &items_[it->second];
}

SliceCounts ItemSet::Counts() const {
  SliceCounts c;
  for (const Item& item : items_) {
    const bool enja = item.direction == Direction::kEnToJa;
    const bool easy = item.tier == Tier::kEasy;
    (enja ? c.en_to_ja : c.ja_to_en)++;
    (easy ? c.easy : c.hard)++;
    if (enja) {
      (easy ? c.en_to_ja_easy : c.en_to_ja_hard)++;
    } else {
      (easy ? c.ja_to_en_easy : c.ja_to_en_hard)++;
    }
  }
  return c;
}

// ---- configs ---------------------------------------------------------------

void ValidateJudgeConfig(const JudgeConfig& judge) {
  if (judge.decoding.temperature != 0.0) {
    throw ValidationError("judge decoding temperature must be 0, got " +
                          std::to_string(judge.decoding.temperature));
  }
  if (judge.model.id.empty()) throw ValidationError("judge model id is empty");
  if (judge.max_retries < 0) {
    throw ValidationError("judge max_retries must be >= 0");
  }
  if (judge.decoding.max_output_tokens <= 0) {
    throw ValidationError("judge max_output_tokens must be positive");
  }
}

// ---- translations ------------------------------------------------------------

void TranslationStore::Put(Translation t) {
  auto key = std::make_pair(t.item_id, t.model_id);
  by_key_.insert_or_assign(std::move(key), std::move(t));
}

void TranslationStore::Insert(Translation t) {
  auto key = std::make_pair(t.item_id, t.model_id);
  if (by_key_.count(key)) {
    throw ValidationError("duplicate translation for item '" + t.item_id +
                          "', model '" + t.model_id + "'");
  }
  by_key_.emplace(std::move(key), std::move(t));
}

const Translation* TranslationStore::Find(std::string_view item_id,
                                          std::string_view model_id) const {
  auto it = by_key_.find({std::string(item_id), std::string(model_id)});
  return it == by_key_.end() ? nullptr : &it->second;
}

std::vector<const Translation*> TranslationStore::Sorted() const {
  std::vector<const Translation*> out;
  out.reserve(by_key_.size());
  for (const auto& [key, t] : by_key_) out.push_back(&t);
  return out;
}

// ---- pairs and judgments ---------------------------------------------------

std::string PairKey(std::string_view item_id, std::string_view left,
                    std::string_view right) {
  std::string key;
  key.reserve(item_id.size() + left.size() + right.size() + 2);
  key.append(item_id).push_back('\x1f');
  key.append(left).push_back('\x1f');
  key.append(right);
  return key;
}

std::optional<std::string> WinnerFor(const PairAssignment& pair, Verdict v) {
  switch (v) {
    case Verdict::kA:
      return pair.a_model();
    case Verdict::kB:
      return pair.b_model();
    case Verdict::kJudgeRefused:
      return std::nullopt;
  }
  return std::nullopt;
}

void ValidateJudgment(const Judgment& j) {
  if (j.pair.left_model == j.pair.right_model) {
    throw ValidationError("judgment compares model '" + j.pair.left_model +
                          "' with itself");
  }
  if (j.winner_model != WinnerFor(j.pair, j.verdict)) {
    throw ValidationError("judgment on item '" + j.pair.item_id +
                          "' has winner_model inconsistent with verdict " +
                          std::string(ToString(j.verdict)) + " and a_side " +
                          std::string(ToString(j.pair.a_side)));
  }
  if (j.input_tokens < 0 || j.output_tokens < 0) {
    throw ValidationError("negative token count in judgment on item '" +
                          j.pair.item_id + "'");
  }
}

bool AnchorSet::IsAnchor(std::string_view model_id) const {
  return std::any_of(anchors.begin(), anchors.end(),
                     [&](const ModelRef& m) { return m.id == model_id; });
}

std::vector<std::string> AnchorSet::AnchorIds() const {
  std::vector<std::string> ids;
  ids.reserve(anchors.size());
  for (const ModelRef& m : anchors) ids.push_back(m.id);
  return ids;
}

// ---- JSON ------------------------------------------------------------------

void to_json(Json& j, const Item& v) {
  j = Json{{"id", v.id},
           {"direction", ToString(v.direction)},
           {"tier", ToString(v.tier)},
           {"source_text", v.source_text}};
}

void from_json(const Json& j, Item& v) {
  v.id = j.at("id").get<std::string>();
  v.direction = ParseDirection(j.at("direction").get<std::string>());
  v.tier = ParseTier(j.at("tier").get<std::string>());
  v.source_text = j.at("source_text").get<std::string>();
}

void to_json(Json& j, const DecodingConfig& v) {
  j = Json{{"temperature", v.temperature},
           {"max_output_tokens", v.max_output_tokens},
           {"extra", v.extra}};
}

void from_json(const Json& j, DecodingConfig& v) {
  v = DecodingConfig{};
  if (j.contains("temperature")) v.temperature = j.at("temperature").get<double>();
  if (j.contains("max_output_tokens")) {
    v.max_output_tokens = j.at("max_output_tokens").get<int>();
  }
  if (j.contains("extra")) {
    v.extra = j.at("extra").get<std::map<std::string, std::string>>();
  }
  if (!(v.temperature >= 0.0)) {
    throw ValidationError("decoding temperature must be >= 0");
  }
  if (v.max_output_tokens <= 0) {
    throw ValidationError("decoding max_output_tokens must be positive");
  }
}

void to_json(Json& j, const ModelRef& v) {
  j = Json{{"id", v.id}, {"endpoint", v.endpoint}, {"decoding", v.decoding}};
}

void from_json(const Json& j, ModelRef& v) {
  v.id = j.at("id").get<std::string>();
  v.endpoint = j.value("endpoint", std::string(kFrozenEndpoint));
  v.decoding = j.contains("decoding") ? j.at("decoding").get<DecodingConfig>()
                                      : DecodingConfig{};
  if (v.id.empty()) throw ValidationError("model id is empty");
}

void to_json(Json& j, const JudgeConfig& v) {
  j = Json{{"model", v.model},
           {"prompt_id", v.prompt_id},
           {"decoding", v.decoding},
           {"max_retries", v.max_retries}};
}

void from_json(const Json& j, JudgeConfig& v) {
  v.model = j.at("model").get<ModelRef>();
  v.prompt_id = j.at("prompt_id").get<std::string>();
  v.decoding = j.contains("decoding") ? j.at("decoding").get<DecodingConfig>()
                                      : DecodingConfig{};
  v.max_retries = j.value("max_retries", 3);
}

void to_json(Json& j, const Translation& v) {
  j = Json{{"item_id", v.item_id},
           {"model_id", v.model_id},
           {"text", v.text},
           {"generated_at", v.generated_at},
           {"generation_meta", v.generation_meta}};
}

void from_json(const Json& j, Translation& v) {
  v.item_id = j.at("item_id").get<std::string>();
  v.model_id = j.at("model_id").get<std::string>();
  v.text = j.at("text").get<std::string>();
  v.generated_at = j.value("generated_at", std::string());
  v.generation_meta =
      j.contains("generation_meta")
          ? j.at("generation_meta").get<std::map<std::string, std::string>>()
          : std::map<std::string, std::string>{};
}

void to_json(Json& j, const PairAssignment& v) {
  j = Json{{"item_id", v.item_id},
           {"left_model", v.left_model},
           {"right_model", v.right_model},
           {"a_side", ToString(v.a_side)},
           {"seed", v.seed}};
}

void from_json(const Json& j, PairAssignment& v) {
  v.item_id = j.at("item_id").get<std::string>();
  v.left_model = j.at("left_model").get<std::string>();
  v.right_model = j.at("right_model").get<std::string>();
  v.a_side = ParseSide(j.at("a_side").get<std::string>());
  v.seed = j.at("seed").get<std::uint64_t>();
  if (v.left_model == v.right_model) {
    throw ValidationError("pair compares model '" + v.left_model +
                          "' with itself");
  }
}

void to_json(Json& j, const Judgment& v) {
  j = Json{{"pair", v.pair},
           {"verdict", ToString(v.verdict)},
           {"winner_model", v.winner_model ? Json(*v.winner_model) : Json()},
           {"analysis_text", v.analysis_text},
           {"input_tokens", v.input_tokens},
           {"output_tokens", v.output_tokens},
           {"tokens_estimated", v.tokens_estimated},
           {"attempts", v.attempts},
           {"refusal_reason", v.refusal_reason},
           {"judge", Json{{"model_id", v.judge.model_id},
                          {"prompt_id", v.judge.prompt_id}}},
           {"judged_at", v.judged_at}};
}

void from_json(const Json& j, Judgment& v) {
  v.pair = j.at("pair").get<PairAssignment>();
  v.verdict = ParseVerdict(j.at("verdict").get<std::string>());
  const Json& w = j.at("winner_model");
  v.winner_model =
      w.is_null() ? std::nullopt : std::optional<std::string>(w.get<std::string>());
  v.analysis_text = j.value("analysis_text", std::string());
  v.input_tokens = j.value("input_tokens", std::int64_t{0});
  v.output_tokens = j.value("output_tokens", std::int64_t{0});
  v.tokens_estimated = j.value("tokens_estimated", false);
  v.attempts = j.value("attempts", 1);
  v.refusal_reason = j.value("refusal_reason", std::string());
  const Json& judge = j.at("judge");
  v.judge.model_id = judge.at("model_id").get<std::string>();
  v.judge.prompt_id = judge.value("prompt_id", std::string());
  v.judged_at = j.value("judged_at", std::string());
  ValidateJudgment(v);
}

// ---- files -----------------------------------------------------------------

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

void WriteFile(const fs::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("error writing '" + tmp.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    throw IoError("cannot rename '" + tmp.string() + "': " + ec.message());
  }
}

namespace {

Json ParseJsonDocument(const fs::path& path) {
  std::string text = ReadFile(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ParseError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

template <typename T>
T ConvertRecord(const Json& j, const fs::path& path, size_t line) {
  try {
    return j.get<T>();
  } catch (const Json::exception& e) {
    throw ParseError("bad record at " + path.string() + ":" +
                     std::to_string(line) + ": " + e.what());
  }
}

}  // namespace

std::vector<Json> ReadJsonLines(const fs::path& path) {
  std::string text = ReadFile(path);
  std::vector<Json> out;
  size_t pos = 0;
  size_t line_no = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    std::string_view line(text.data() + pos,
                          (terminated ? nl : text.size()) - pos);
    pos = terminated ? nl + 1 : text.size();
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::exception& e) {
      if (!terminated) break;  // torn final record
      throw ParseError("malformed JSON at " + path.string() + ":" +
                       std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

JsonlAppender::JsonlAppender(const fs::path& path) : path_(path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fd_ = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw IoError("cannot open '" + path.string() +
                  "' for append: " + std::strerror(errno));
  }
}

JsonlAppender::~JsonlAppender() {
  if (fd_ >= 0) ::close(fd_);
}

void JsonlAppender::Append(const Json& record) {
  std::string line = record.dump();
  line.push_back('\n');
  std::lock_guard<std::mutex> lock(mu_);
  if (::flock(fd_, LOCK_EX) != 0) {
    throw IoError("flock failed on '" + path_.string() +
                  "': " + std::strerror(errno));
  }
  size_t written = 0;
  int err = 0;
  while (written < line.size()) {
    ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      err = errno;
      break;
    }
    written += static_cast<size_t>(n);
  }
  ::flock(fd_, LOCK_UN);
  if (err != 0) {
    throw IoError("write failed on '" + path_.string() +
                  "': " + std::strerror(err));
  }
}

std::vector<Judgment> ReadJudgments(const fs::path& path) {
  std::vector<Judgment> out;
  size_t line = 0;
  for (const Json& j : ReadJsonLines(path)) {
    ++line;
    try {
      out.push_back(ConvertRecord<Judgment>(j, path, line));
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line) + ": " +
                            e.what());
    }
  }
  return out;
}

std::vector<Judgment> ReadJudgmentsIfExists(const fs::path& path) {
  if (!fs::exists(path)) return {};
  return ReadJudgments(path);
}

TranslationStore ReadTranslations(const fs::path& path) {
  TranslationStore store;
  size_t line = 0;
  for (const Json& j : ReadJsonLines(path)) {
    store.Put(ConvertRecord<Translation>(j, path, ++line));
  }
  return store;
}

TranslationStore ReadTranslationsIfExists(const fs::path& path) {
  if (!fs::exists(path)) return {};
  return ReadTranslations(path);
}

// ---- item sets and anchor sets --------------------------------------------

ItemSet LoadItemSet(const fs::path& path) {
  Json doc = ParseJsonDocument(path);
  std::string name;
  std::vector<Item> items;
  try {
    name = doc.value("name", std::string());
    for (const Json& j : doc.at("items")) items.push_back(j.get<Item>());
  } catch (const Json::exception& e) {
    throw ParseError("bad item set '" + path.string() + "': " + e.what());
  }
  return ItemSet(std::move(name), std::move(items));
}

void SaveItemSet(const ItemSet& items, const fs::path& path) {
  Json doc{{"name", items.name()}, {"items", items.items()}};
  WriteFile(path, doc.dump(2) + "\n");
}

AnchorSet LoadAnchorSet(const fs::path& dir, const ItemSet& items) {
  Json manifest = ParseJsonDocument(dir / "manifest.json");
  AnchorSet set;
  std::string version_text;
  try {
    version_text = manifest.at("version").get<std::string>();
    set.judge = manifest.at("judge").get<JudgeConfig>();
    set.anchors = manifest.at("anchors").get<std::vector<ModelRef>>();
  } catch (const Json::exception& e) {
    throw ParseError("bad manifest in '" + dir.string() + "': " + e.what());
  }
  set.version = Version::Parse(version_text);
  ValidateJudgeConfig(set.judge);

  if (set.anchors.size() < 2) {
    throw ValidationError("anchor set needs at least 2 anchors, got " +
                          std::to_string(set.anchors.size()));
  }
  std::set<std::string> ids;
  for (const ModelRef& m : set.anchors) {
    if (!ids.insert(m.id).second) {
      throw ValidationError("duplicate anchor id '" + m.id + "'");
    }
  }

  const fs::path tpath = dir / "translations.jsonl";
  size_t line = 0;
  for (const Json& j : ReadJsonLines(tpath)) {
    Translation t = ConvertRecord<Translation>(j, tpath, ++line);
    if (!ids.count(t.model_id)) {
      throw ValidationError("translation for non-anchor model '" + t.model_id +
                            "' in " + tpath.string());
    }
    if (!items.Find(t.item_id)) {
      throw ValidationError("translation for unknown item '" + t.item_id +
                            "' in " + tpath.string());
    }
    set.translations.Insert(std::move(t));
  }
  for (const Item& item : items.items()) {
    for (const ModelRef& m : set.anchors) {
      if (!set.translations.Find(item.id, m.id)) {
        throw IncompleteError("anchor set is missing the translation of item '" +
                              item.id + "' by anchor '" + m.id + "'");
      }
    }
  }

  set.frozen_judgments = ReadJudgments(dir / "judgments.jsonl");
  for (const Judgment& jd : set.frozen_judgments) {
    if (!ids.count(jd.pair.left_model) || !ids.count(jd.pair.right_model)) {
      throw ValidationError("frozen judgment on item '" + jd.pair.item_id +
                            "' references a non-anchor model");
    }
    if (!items.Find(jd.pair.item_id)) {
      throw ValidationError("frozen judgment references unknown item '" +
                            jd.pair.item_id + "'");
    }
  }
  return set;
}

void SaveAnchorSet(const AnchorSet& anchors, const fs::path& dir) {
  Json manifest{{"version", anchors.version.ToString()},
                {"judge", anchors.judge},
                {"anchors", anchors.anchors}};
  WriteFile(dir / "manifest.json", manifest.dump(2) + "\n");
  std::string tl;
  for (const Translation* t : anchors.translations.Sorted()) {
    tl += Json(*t).dump();
    tl.push_back('\n');
  }
  WriteFile(dir / "translations.jsonl", tl);
  std::string jl;
  for (const Judgment& j : anchors.frozen_judgments) {
    jl += Json(j).dump();
    jl.push_back('\n');
  }
  WriteFile(dir / "judgments.jsonl", jl);
}

std::string CanonicalJudgmentsSha256(const std::vector<Judgment>& judgments) {
  std::vector<const Judgment*> sorted;
  sorted.reserve(judgments.size());
  for (const Judgment& j : judgments) sorted.push_back(&j);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Judgment* a, const Judgment* b) {
                     return PairKey(a->pair) < PairKey(b->pair);
                   });
  std::string buf;
  for (const Judgment* j : sorted) {
    Json rec = *j;
    rec.erase("judged_at");
    buf += rec.dump();
    buf.push_back('\n');
  }
  return Sha256Hex(buf);
}

std::string NowUtcIso8601() {
  using namespace std::chrono;
  auto now = system_clock::now();
  std::time_t t = system_clock::to_time_t(now);
  auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof(out), "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

}  // namespace anchoreval
