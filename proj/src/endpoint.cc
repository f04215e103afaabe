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

#include "anchoreval/endpoint.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "anchoreval/error.h"
#include "httplib.h"

namespace anchoreval {
namespace {

bool Retryable(int http_status) {
  return http_status == 429 || http_status >= 500;
}

std::string Truncate(std::string_view s, size_t n = 300) {
  if (s.size() <= n) return std::string(s);
  return std::string(s.substr(0, n)) + "...";
}

}  // namespace

void ValidateProfile(const EndpointProfile& p) {
  if (p.base_url.empty()) throw ConfigError("endpoint base_url is empty");
  if (p.base_url.rfind("http://", 0) != 0 &&
      p.base_url.rfind("https://", 0) != 0) {
    throw ConfigError("endpoint base_url must start with http:// or https://");
  }
  if (p.max_concurrency < 1) throw ConfigError("max_concurrency must be >= 1");
  if (p.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (p.request_timeout.count() <= 0) {
    throw ConfigError("request_timeout must be positive");
  }
  if (p.backoff_initial.count() < 0) {
    throw ConfigError("backoff must be >= 0");
  }
}

void to_json(Json& j, const EndpointProfile& v) {
  j = Json{{"base_url", v.base_url},
           {"api_key_env", v.api_key_env},
           {"request_timeout_ms", v.request_timeout.count()},
           {"max_retries", v.max_retries},
           {"max_concurrency", v.max_concurrency},
           {"backoff_initial_ms", v.backoff_initial.count()}};
}

void from_json(const Json& j, EndpointProfile& v) {
  EndpointProfile d;
  v.base_url = j.at("base_url").get<std::string>();
  v.api_key_env = j.value("api_key_env", std::string());
  v.request_timeout = std::chrono::milliseconds(
      j.value("request_timeout_ms", d.request_timeout.count()));
  v.max_retries = j.value("max_retries", d.max_retries);
  v.max_concurrency = j.value("max_concurrency", d.max_concurrency);
  v.backoff_initial = std::chrono::milliseconds(
      j.value("backoff_initial_ms", d.backoff_initial.count()));
}

EndpointProfile LoadProfile(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  EndpointProfile p;
  try {
    p = Json::parse(text).get<EndpointProfile>();
  } catch (const Json::exception& e) {
    throw ConfigError("bad endpoint profile '" + path.string() +
                      "': " + e.what());
  }
  ValidateProfile(p);
  return p;
}

Json BuildChatBody(const ChatRequest& request) {
  Json body = {
      {"model", request.model},
      {"messages", Json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.decoding.temperature},
      {"max_tokens", request.decoding.max_output_tokens}};
  for (const auto& [key, value] : request.decoding.extra) {
    Json parsed = Json::parse(value, nullptr, /*allow_exceptions=*/false);
    body[key] = parsed.is_discarded() ? Json(value) : parsed;
  }
  return body;
}

ChatResponse ParseChatBody(std::string_view body) {
  ChatResponse r;
  Json j = Json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    r.status = ChatStatus::kFailed;
    r.error = "response is not a JSON object: " + Truncate(body);
    return r;
  }
  if (auto usage = j.find("usage"); usage != j.end() && usage->is_object()) {
    if (auto p = usage->find("prompt_tokens");
        p != usage->end() && p->is_number_integer()) {
      r.prompt_tokens = p->get<std::int64_t>();
    }
    if (auto c = usage->find("completion_tokens");
        c != usage->end() && c->is_number_integer()) {
      r.completion_tokens = c->get<std::int64_t>();
    }
  }
  auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) {
    r.status = ChatStatus::kFailed;
    r.error = "response has no choices";
    return r;
  }
  const Json& choice = (*choices)[0];
  const Json message = choice.value("message", Json::object());
  if (auto refusal = message.find("refusal");
      refusal != message.end() && refusal->is_string() &&
      !refusal->get<std::string>().empty()) {
    r.status = ChatStatus::kBlocked;
    r.error = "refusal: " + Truncate(refusal->get<std::string>());
    return r;
  }
  if (choice.value("finish_reason", Json()).is_string() &&
      choice["finish_reason"] == "content_filter") {
    r.status = ChatStatus::kBlocked;
    r.error = "content_filter";
    return r;
  }
  if (auto content = message.find("content");
      content != message.end() && content->is_string()) {
    r.text = content->get<std::string>();
  }
  r.status = ChatStatus::kOk;
  return r;
}

HttpChatClient::HttpChatClient(EndpointProfile profile)
    : profile_(std::move(profile)) {
  ValidateProfile(profile_);
  if (!profile_.api_key_env.empty()) {
    const char* key = std::getenv(profile_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw ConfigError("environment variable '" + profile_.api_key_env +
                        "' holding the API key is not set");
    }
    api_key_ = key;
  }
  const std::string& url = profile_.base_url;
  size_t host_start = url.find("://") + 3;
  size_t path_start = url.find('/', host_start);
  if (path_start == std::string::npos) {
    scheme_host_port_ = url;
  } else {
    scheme_host_port_ = url.substr(0, path_start);
    path_prefix_ = url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') {
      path_prefix_.pop_back();
    }
  }
}

ChatResponse HttpChatClient::Complete(const ChatRequest& request) {
  const std::string body = BuildChatBody(request).dump();
  const std::string path = path_prefix_ + "/chat/completions";
  auto backoff = profile_.backoff_initial;
  ChatResponse last;
  for (int attempt = 0; attempt <= profile_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(profile_.request_timeout);
    client.set_read_timeout(profile_.request_timeout);
    client.set_write_timeout(profile_.request_timeout);
    httplib::Headers headers;
    if (!api_key_.empty()) {
      headers.emplace("Authorization", "Bearer " + api_key_);
    }
    auto res = client.Post(path, headers, body, "application/json");
    last = ChatResponse{};
    last.attempts = attempt + 1;
    if (!res) {
      last.status = ChatStatus::kFailed;
      last.error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    last.http_status = res->status;
    if (res->status == 200) {
      ChatResponse parsed = ParseChatBody(res->body);
      parsed.http_status = 200;
      parsed.attempts = attempt + 1;
      return parsed;
    }
    last.status = ChatStatus::kFailed;
    last.error = "HTTP " + std::to_string(res->status) + ": " +
                 Truncate(res->body);
    if (res->body.find("content_filter") != std::string::npos ||
        res->body.find("SAFETY") != std::string::npos) {
      last.status = ChatStatus::kBlocked;
      return last;
    }
    if (!Retryable(res->status)) return last;
  }
  return last;
}

void RunBounded(size_t count, int max_concurrency,
                const std::function<void(size_t)>& fn) {
  if (count == 0) return;
  const size_t workers =
      std::min(count, static_cast<size_t>(std::max(1, max_concurrency)));
  std::atomic<size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto work = [&] {
    while (!stop.load()) {
      size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        stop.store(true);
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (size_t w = 0; w < workers; ++w) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace anchoreval
