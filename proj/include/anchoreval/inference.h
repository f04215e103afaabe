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

#ifndef ANCHOREVAL_INFERENCE_H_
#define ANCHOREVAL_INFERENCE_H_

#include <filesystem>
#include <functional>
#include <string>

#include "anchoreval/datamodel.h"
#include "anchoreval/endpoint.h"

namespace anchoreval {

// generation_meta keys.
inline constexpr std::string_view kMetaPromptId = "prompt_id";
inline constexpr std::string_view kMetaDecodingSha = "decoding_sha256";
inline constexpr std::string_view kMetaStatus = "status";  // ok/blocked/failed
inline constexpr std::string_view kMetaError = "error";

// SHA-256 of the canonical JSON of the decoding settings.
std::string DecodingSha256(const DecodingConfig& decoding);

// Never throws for model-side failures: they produce empty text with
// generation_meta.status != "ok" and generation_meta.error set.
Translation TranslateItem(const Item& item, const ModelRef& model,
                          ChatClient& client);
// Builds an HttpChatClient first; throws ConfigError for a missing API key.
Translation TranslateItem(const Item& item, const ModelRef& model,
                          const EndpointProfile& profile);

struct GenerateOptions {
  int max_concurrency = 1;
  // Re-attempt items whose stored translation is a failure.
  bool retry_failed = false;
  // Timestamp source; defaults to the wall clock.
  std::function<std::string()> clock;
};

struct GenerateSummary {
  int generated = 0;  // new successful translations
  int cached = 0;     // reused from the store
  int failed = 0;     // new translations that degraded to empty text
};

// Ensures every item has a translation for `model` in the JSON Lines store at
// `store_path`, appending new records as they complete. A stored record is
// reused when its prompt id and decoding hash match the current settings.
GenerateSummary GenerateAll(const ItemSet& items, const ModelRef& model,
                            ChatClient& client,
                            const std::filesystem::path& store_path,
                            const GenerateOptions& options = {});

}  // namespace anchoreval

#endif  // ANCHOREVAL_INFERENCE_H_
