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

#ifndef ANCHOREVAL_TESTS_MOCK_SERVER_H_
#define ANCHOREVAL_TESTS_MOCK_SERVER_H_

#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "anchoreval/datamodel.h"
#include "httplib.h"

namespace anchoreval::testing {

// Local chat-completions server on an ephemeral port. The handler gets the
// parsed request body and fills the response.
class MockChatServer {
 public:
  using Handler = std::function<void(const Json& body,
                                     const httplib::Request& req,
                                     httplib::Response& res)>;

  explicit MockChatServer(Handler handler) : handler_(std::move(handler)) {
    server_.new_task_queue = [] { return new httplib::ThreadPool(16); };
    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   int now = ++in_flight_;
                   int peak = peak_.load();
                   while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
                   }
                   ++hits_;
                   {
                     std::lock_guard<std::mutex> lock(mu_);
                     auth_.push_back(req.get_header_value("Authorization"));
                   }
                   handler_(Json::parse(req.body), req, res);
                   --in_flight_;
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockChatServer() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1";
  }
  int hits() const { return hits_.load(); }
  int peak() const { return peak_.load(); }
  std::vector<std::string> auth() const {
    std::lock_guard<std::mutex> lock(mu_);
    return auth_;
  }

 private:
  Handler handler_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
  mutable std::mutex mu_;
  std::vector<std::string> auth_;
};

// OpenAI-style success body.
inline std::string ChatBody(const std::string& content, int prompt_tokens = 10,
                            int completion_tokens = 5) {
  Json j = {{"choices", Json::array({{{"index", 0},
                                      {"message", {{"role", "assistant"}, {"content", content}}},
                                      {"finish_reason", "stop"}}})},
            {"usage", {{"prompt_tokens", prompt_tokens},
                       {"completion_tokens", completion_tokens}}}};
  return j.dump();
}

}  // namespace anchoreval::testing

#endif  // ANCHOREVAL_TESTS_MOCK_SERVER_H_
