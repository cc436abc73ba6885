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

#include "codezip/prompt/lm_client.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include "codezip/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace codezip::prompt {

using nlohmann::json;

std::string chat_request_json(const ChatRequest& req) {
  json body;
  body["model"] = req.model;
  body["messages"] = json::array();
  for (const auto& m : req.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  body["temperature"] = req.temperature;
  return body.dump();
}

HttpLMClient::HttpLMClient(HttpClientOptions options) : options_(std::move(options)) {
  const auto& url = options_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw InvalidArgument("LM endpoint must be an http(s):// URL: " + url);
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw InvalidArgument("unsupported LM endpoint scheme: " + scheme);
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (options_.max_attempts < 1) throw InvalidArgument("max_attempts must be at least 1");
}

ChatResponse HttpLMClient::complete(const ChatRequest& req) {
  httplib::Client client(origin_);
  client.set_connection_timeout(options_.timeout_s, 0);
  client.set_read_timeout(options_.timeout_s, 0);
  httplib::Headers headers;
  if (!options_.key_env.empty()) {
    if (const char* key = std::getenv(options_.key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  const auto body = chat_request_json(req);
  std::string last_error;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    if (attempt > 1) std::this_thread::sleep_for(std::chrono::milliseconds(options_.backoff_ms * (attempt - 1)));
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError("LM request failed with HTTP " + std::to_string(res->status) + " after " +
                           std::to_string(attempt) + " attempt(s)");
    }
    try {
      const auto reply = json::parse(res->body);
      return {reply.at("choices").at(0).at("message").at("content").get<std::string>(), attempt};
    } catch (const json::exception& e) {
      throw TransportError(std::string("malformed LM response: ") + e.what());
    }
  }
  throw TransportError("LM request failed after " + std::to_string(options_.max_attempts) +
                       " attempt(s): " + last_error);
}

ChatResponse StubLMClient::complete(const ChatRequest& req) {
  ++calls_;
  return {responder_(req), 1};
}

StubLMClient::Responder StubLMClient::echo_gold(std::unordered_map<std::string, std::string> gold_by_tag) {
  return [gold = std::move(gold_by_tag)](const ChatRequest& req) {
    auto it = gold.find(req.tag);
    return it == gold.end() ? std::string() : it->second;
  };
}

}  // namespace codezip::prompt
