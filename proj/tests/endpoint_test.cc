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

#include <gtest/gtest.h>
#include <stdlib.h>

#include <chrono>
#include <thread>

#include "anchoreval/error.h"
#include "mock_server.h"
#include "test_util.h"

namespace anchoreval {
namespace {

using testing::ChatBody;
using testing::MockChatServer;

EndpointProfile Profile(const MockChatServer& server) {
  EndpointProfile p;
  p.base_url = server.base_url();
  p.backoff_initial = std::chrono::milliseconds(1);
  p.request_timeout = std::chrono::milliseconds(5000);
  p.max_retries = 3;
  return p;
}

ChatRequest Request(const std::string& prompt = "hi") {
  ChatRequest r;
  r.model = "org/model";
  r.prompt = prompt;
  r.decoding.temperature = 0.0;
  r.decoding.max_output_tokens = 64;
  return r;
}

TEST(EndpointTest, WireFormatAndUsage) {
  Json seen;
  MockChatServer server([&](const Json& body, const httplib::Request&, httplib::Response& res) {
    seen = body;
    res.set_content(ChatBody("こんにちは", 12, 3), "application/json");
  });
  ::setenv("ANCHOREVAL_TEST_KEY", "sekret", 1);
  EndpointProfile p = Profile(server);
  p.api_key_env = "ANCHOREVAL_TEST_KEY";
  HttpChatClient client(p);
  ChatRequest req = Request("翻訳して");
  req.decoding.extra = {{"top_p", "0.5"}, {"reasoning_effort", "low"}};
  ChatResponse r = client.Complete(req);
  EXPECT_EQ(r.status, ChatStatus::kOk);
  EXPECT_EQ(r.text, "こんにちは");
  EXPECT_EQ(r.prompt_tokens, 12);
  EXPECT_EQ(r.completion_tokens, 3);
  EXPECT_EQ(seen["model"], "org/model");
  EXPECT_EQ(seen["messages"][0]["role"], "user");
  EXPECT_EQ(seen["messages"][0]["content"], "翻訳して");
  EXPECT_EQ(seen["temperature"], 0.0);
  EXPECT_EQ(seen["max_tokens"], 64);
  EXPECT_EQ(seen["top_p"], 0.5);
  EXPECT_EQ(seen["reasoning_effort"], "low");
  ASSERT_EQ(server.auth().size(), 1u);
  EXPECT_EQ(server.auth()[0], "Bearer sekret");
}

TEST(EndpointTest, MissingKeyIsConfigError) {
  ::unsetenv("ANCHOREVAL_UNSET_KEY");
  EndpointProfile p;
  p.base_url = "http://127.0.0.1:9/v1";
  p.api_key_env = "ANCHOREVAL_UNSET_KEY";
  EXPECT_THROW(HttpChatClient{p}, ConfigError);
  p.api_key_env.clear();
  p.base_url = "ftp://x";
  EXPECT_THROW(HttpChatClient{p}, ConfigError);
}

TEST(EndpointTest, ServerErrorsRetriedThenFail) {
  MockChatServer server([](const Json&, const httplib::Request&, httplib::Response& res) {
    res.status = 500;
    res.set_content("boom", "text/plain");
  });
  HttpChatClient client(Profile(server));
  ChatResponse r = client.Complete(Request());
  EXPECT_EQ(r.status, ChatStatus::kFailed);
  EXPECT_EQ(server.hits(), 4);
  EXPECT_EQ(r.attempts, 4);
  EXPECT_EQ(r.http_status, 500);
}

TEST(EndpointTest, TransientErrorRecovers) {
  std::atomic<int> n{0};
  MockChatServer server([&](const Json&, const httplib::Request&, httplib::Response& res) {
    if (n++ < 2) {
      res.status = 429;
      return;
    }
    res.set_content(ChatBody("ok"), "application/json");
  });
  HttpChatClient client(Profile(server));
  ChatResponse r = client.Complete(Request());
  EXPECT_EQ(r.status, ChatStatus::kOk);
  EXPECT_EQ(r.attempts, 3);
}

TEST(EndpointTest, ClientErrorNotRetried) {
  MockChatServer server([](const Json&, const httplib::Request&, httplib::Response& res) {
    res.status = 400;
  });
  HttpChatClient client(Profile(server));
  EXPECT_EQ(client.Complete(Request()).status, ChatStatus::kFailed);
  EXPECT_EQ(server.hits(), 1);
}

TEST(EndpointTest, ContentFilterIsBlocked) {
  MockChatServer server([](const Json&, const httplib::Request&, httplib::Response& res) {
    Json j = {{"choices", Json::array({{{"message", {{"content", nullptr}}},
                                        {"finish_reason", "content_filter"}}})}};
    res.set_content(j.dump(), "application/json");
  });
  HttpChatClient client(Profile(server));
  EXPECT_EQ(client.Complete(Request()).status, ChatStatus::kBlocked);

  MockChatServer safety([](const Json&, const httplib::Request&, httplib::Response& res) {
    res.status = 400;
    res.set_content(R"({"error":{"message":"blocked","reason":"SAFETY"}})", "application/json");
  });
  HttpChatClient c2(Profile(safety));
  EXPECT_EQ(c2.Complete(Request()).status, ChatStatus::kBlocked);
}

TEST(EndpointTest, ParseChatBodyVariants) {
  EXPECT_EQ(ParseChatBody("not json").status, ChatStatus::kFailed);
  EXPECT_EQ(ParseChatBody(R"({"choices":[]})").status, ChatStatus::kFailed);
  ChatResponse refusal = ParseChatBody(
      R"({"choices":[{"message":{"content":null,"refusal":"I can't"}}]})");
  EXPECT_EQ(refusal.status, ChatStatus::kBlocked);
  ChatResponse no_usage = ParseChatBody(R"({"choices":[{"message":{"content":"x"}}]})");
  EXPECT_EQ(no_usage.status, ChatStatus::kOk);
  EXPECT_FALSE(no_usage.prompt_tokens.has_value());
}

TEST(EndpointTest, ConnectionRefusedIsFailure) {
  EndpointProfile p;
  p.base_url = "http://127.0.0.1:1/v1";
  p.max_retries = 1;
  p.backoff_initial = std::chrono::milliseconds(1);
  HttpChatClient client(p);
  ChatResponse r = client.Complete(Request());
  EXPECT_EQ(r.status, ChatStatus::kFailed);
  EXPECT_EQ(r.attempts, 2);
}

TEST(EndpointTest, ConcurrencyIsBounded) {
  MockChatServer server([](const Json&, const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    res.set_content(ChatBody("ok"), "application/json");
  });
  HttpChatClient client(Profile(server));
  RunBounded(24, 3, [&](size_t) { client.Complete(Request()); });
  EXPECT_EQ(server.hits(), 24);
  EXPECT_LE(server.peak(), 3);
  EXPECT_GE(server.peak(), 2);
}

TEST(RunBoundedTest, PropagatesFirstError) {
  std::atomic<int> ran{0};
  EXPECT_THROW(RunBounded(100, 4,
                          [&](size_t i) {
                            ++ran;
                            if (i == 5) throw IoError("disk full");
                          }),
               IoError);
  EXPECT_LT(ran.load(), 100);
}

TEST(ProfileTest, LoadAndValidate) {
  testing::TempDir dir;
  WriteFile(dir / "p.json", R"({"base_url":"https://api.example.com/v1","max_concurrency":2})");
  EndpointProfile p = LoadProfile(dir / "p.json");
  EXPECT_EQ(p.max_concurrency, 2);
  EXPECT_EQ(p.max_retries, 3);
  WriteFile(dir / "bad.json", R"({"base_url":"https://x","max_concurrency":0})");
  EXPECT_THROW(LoadProfile(dir / "bad.json"), ConfigError);
  EXPECT_THROW(LoadProfile(dir / "missing.json"), ConfigError);
}

}  // namespace
}  // namespace anchoreval
