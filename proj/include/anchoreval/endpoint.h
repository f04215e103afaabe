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

// Chat-completion client over the common HTTP JSON wire format
// (POST {base_url}/chat/completions with a messages array).

#ifndef ANCHOREVAL_ENDPOINT_H_
#define ANCHOREVAL_ENDPOINT_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "anchoreval/datamodel.h"

namespace anchoreval {

struct EndpointProfile {
  std::string base_url;     // e.g. "https://api.example.com/v1"
  std::string api_key_env;  // name of the variable holding the key; may be empty
  std::chrono::milliseconds request_timeout{120000};
  int max_retries = 3;
  int max_concurrency = 4;
  std::chrono::milliseconds backoff_initial{1000};
};

// Throws ConfigError on invalid values.
void ValidateProfile(const EndpointProfile& profile);

// Secrets are never part of the profile, so this is safe to log.
void to_json(Json& j, const EndpointProfile& v);
void from_json(const Json& j, EndpointProfile& v);
EndpointProfile LoadProfile(const std::filesystem::path& path);

struct ChatRequest {
  std::string model;
  std::string prompt;  // sent as a single user message
  DecodingConfig decoding;
};

enum class ChatStatus {
  kOk,
  kBlocked,  // the endpoint refused or filtered the content
  kFailed,   // transport or HTTP failure after retries
};

struct ChatResponse {
  ChatStatus status = ChatStatus::kFailed;
  std::string text;
  std::optional<std::int64_t> prompt_tokens;
  std::optional<std::int64_t> completion_tokens;
  std::string error;
  int http_status = 0;
  int attempts = 0;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Must be safe to call concurrently.
  virtual ChatResponse Complete(const ChatRequest& request) = 0;
};

// Retries transport errors, 429 and 5xx with exponential backoff, up to
// profile.max_retries extra attempts.
class HttpChatClient : public ChatClient {
 public:
  // Throws ConfigError if api_key_env names an unset variable.
  explicit HttpChatClient(EndpointProfile profile);

  ChatResponse Complete(const ChatRequest& request) override;

 private:
  EndpointProfile profile_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::string api_key_;
};

// Request body as sent on the wire. Values in decoding.extra that parse as
// JSON are sent as JSON values, anything else as strings.
Json BuildChatBody(const ChatRequest& request);

// Interprets a 200 response body.
ChatResponse ParseChatBody(std::string_view body);

// Runs fn(0..count-1) on at most max_concurrency threads. Rethrows the first
// exception after all workers stop; remaining tasks are skipped.
void RunBounded(size_t count, int max_concurrency,
                const std::function<void(size_t)>& fn);

}  // namespace anchoreval

#endif  // ANCHOREVAL_ENDPOINT_H_
