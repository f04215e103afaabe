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

#include "anchoreval/inference.h"

#include <atomic>
#include <vector>

#include "anchoreval/hashing.h"
#include "anchoreval/prompts.h"

namespace anchoreval {
namespace {

std::string_view StatusName(ChatStatus s) {
  switch (s) {
    case ChatStatus::kOk:
      return "ok";
    case ChatStatus::kBlocked:
      return "blocked";
    case ChatStatus::kFailed:
      return "failed";
  }
  return "failed";
}

bool IsFailure(const Translation& t) {
  auto it = t.generation_meta.find(std::string(kMetaStatus));
  return it != t.generation_meta.end() && it->second != "ok";
}

}  // namespace

std::string DecodingSha256(const DecodingConfig& decoding) {
  return Sha256Hex(Json(decoding).dump());
}

Translation TranslateItem(const Item& item, const ModelRef& model,
                          ChatClient& client) {
  ChatRequest request{model.id, RenderTranslatePrompt(item), model.decoding};
  ChatResponse response = client.Complete(request);

  Translation t;
  t.item_id = item.id;
  t.model_id = model.id;
  t.generation_meta[std::string(kMetaPromptId)] = TranslatePromptId();
  t.generation_meta[std::string(kMetaDecodingSha)] =
      DecodingSha256(model.decoding);
  t.generation_meta["attempts"] = std::to_string(response.attempts);
  if (response.status == ChatStatus::kOk) {
    t.text = response.text;
    t.generation_meta[std::string(kMetaStatus)] = "ok";
  } else {
    t.generation_meta[std::string(kMetaStatus)] =
        std::string(StatusName(response.status));
    t.generation_meta[std::string(kMetaError)] =
        response.error.empty() ? "unknown error" : response.error;
  }
  return t;
}

Translation TranslateItem(const Item& item, const ModelRef& model,
                          const EndpointProfile& profile) {
  HttpChatClient client(profile);
  return TranslateItem(item, model, client);
}

GenerateSummary GenerateAll(const ItemSet& items, const ModelRef& model,
                            ChatClient& client,
                            const std::filesystem::path& store_path,
                            const GenerateOptions& options) {
  TranslationStore existing = ReadTranslationsIfExists(store_path);
  const std::string prompt_id = TranslatePromptId();
  const std::string decoding_sha = DecodingSha256(model.decoding);

  GenerateSummary summary;
  std::vector<const Item*> todo;
  for (const Item& item : items.items()) {
    const Translation* t = existing.Find(item.id, model.id);
    bool reusable = t != nullptr &&
                    t->generation_meta.count(std::string(kMetaPromptId)) &&
                    t->generation_meta.at(std::string(kMetaPromptId)) ==
                        prompt_id &&
                    t->generation_meta.count(std::string(kMetaDecodingSha)) &&
                    t->generation_meta.at(std::string(kMetaDecodingSha)) ==
                        decoding_sha;
    if (reusable && options.retry_failed && IsFailure(*t)) reusable = false;
    if (reusable) {
      ++summary.cached;
    } else {
      todo.push_back(&item);
    }
  }

  if (!todo.empty()) {
    JsonlAppender out(store_path);
    std::atomic<int> generated{0}, failed{0};
    RunBounded(todo.size(), options.max_concurrency, [&](size_t i) {
      Translation t = TranslateItem(*todo[i], model, client);
      t.generated_at = options.clock ? options.clock() : NowUtcIso8601();
      out.Append(Json(t));
      if (IsFailure(t)) {
        ++failed;
      } else {
        ++generated;
      }
    });
    summary.generated = generated.load();
    summary.failed = failed.load();
  }
  return summary;
}

}  // namespace anchoreval
