// Copyright 2026 The codezip Authors
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

#pragma once

#include <atomic>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

namespace codezip::prompt {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  /// Caller-side key of the query (not sent over the wire).
  std::string tag;
};

struct ChatResponse {
  std::string text;
  int attempts = 1;
};

/// Wire body {model, messages, temperature}.
std::string chat_request_json(const ChatRequest& req);

/// Chat-completion backend. Implementations must be safe to call from
/// several threads at once.
class BaseLMClient {
 public:
  virtual ~BaseLMClient() = default;
  virtual ChatResponse complete(const ChatRequest& req) = 0;
};

struct HttpClientOptions {
  /// Full URL of a chat-completions endpoint, http:// or https://.
  std::string endpoint;
  /// Environment variable holding the bearer key; unset means no auth header.
  std::string key_env = "CODEZIP_LM_KEY";
  int max_attempts = 3;
  int backoff_ms = 250;
  int timeout_s = 60;
};

/// JSON-over-HTTP client. Retries transport errors, 429 and 5xx with
/// linear backoff; other statuses fail at once. Failures raise
/// TransportError carrying the attempt count in the message.
class HttpLMClient final : public BaseLMClient {
 public:
  explicit HttpLMClient(HttpClientOptions options);
  ChatResponse complete(const ChatRequest& req) override;

 private:
  HttpClientOptions options_;
  std::string origin_;
  std::string path_;
};

/// Deterministic local backend driven by a callback.
class StubLMClient final : public BaseLMClient {
 public:
  using Responder = std::function<std::string(const ChatRequest&)>;

  explicit StubLMClient(Responder responder) : responder_(std::move(responder)) {}
  ChatResponse complete(const ChatRequest& req) override;
  std::size_t calls() const { return calls_.load(); }

  /// Answers each request with the gold answer stored under its tag, or an
  /// empty string for unknown tags.
  static Responder echo_gold(std::unordered_map<std::string, std::string> gold_by_tag);

 private:
  Responder responder_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace codezip::prompt
