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

#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <thread>

#include "codezip/ablation.hpp"
#include "codezip/corpus.hpp"
#include "codezip/error.hpp"
#include "codezip/lexer.hpp"
#include "codezip/prompt/lm_client.hpp"
#include "codezip/prompt/rag.hpp"
#include "codezip/typer.hpp"
#include "httplib.h"
#include "json.hpp"

using namespace codezip;
using namespace codezip::prompt;

namespace {

std::unordered_map<std::string, std::string> gold_of(const std::vector<KbEntry>& rows) {
  std::unordered_map<std::string, std::string> gold;
  for (const auto& r : rows) gold[r.id] = r.answer;
  return gold;
}

class LocalServer {
 public:
  explicit LocalServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/chat/completions", handler);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string reply(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

ChatRequest one_message(const std::string& text) {
  ChatRequest req;
  req.model = "m";
  req.messages.push_back({"user", text});
  return req;
}

}  // namespace

TEST_CASE("chat request body carries model, messages and zero temperature") {
  auto req = one_message("hi");
  req.tag = "secret-tag";
  const auto body = nlohmann::json::parse(chat_request_json(req));
  CHECK(body["model"] == "m");
  CHECK(body["messages"][0]["role"] == "user");
  CHECK(body["messages"][0]["content"] == "hi");
  CHECK(body["temperature"] == 0.0);
  CHECK(!body.contains("tag"));
}

TEST_CASE("http client posts, authenticates and parses the reply") {
  std::string seen_auth;
  nlohmann::json seen_body;
  LocalServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_body = nlohmann::json::parse(req.body);
    res.set_content(reply("assertEquals(1, x);"), "application/json");
  });
  ::setenv("CODEZIP_TEST_KEY", "k123", 1);
  HttpLMClient client({.endpoint = server.url(), .key_env = "CODEZIP_TEST_KEY"});
  const auto r = client.complete(one_message("q"));
  CHECK(r.text == "assertEquals(1, x);");
  CHECK(r.attempts == 1);
  CHECK(seen_auth == "Bearer k123");
  CHECK(seen_body["messages"][0]["content"] == "q");
}

TEST_CASE("http client retries server errors and gives up on client errors") {
  std::atomic<int> hits{0};
  LocalServer server([&](const httplib::Request&, httplib::Response& res) {
    if (++hits < 3) {
      res.status = 503;
      return;
    }
    res.set_content(reply("ok"), "application/json");
  });
  HttpLMClient client({.endpoint = server.url(), .key_env = "", .max_attempts = 3, .backoff_ms = 1});
  const auto r = client.complete(one_message("q"));
  CHECK(r.text == "ok");
  CHECK(r.attempts == 3);

  hits = 0;
  HttpLMClient impatient({.endpoint = server.url(), .key_env = "", .max_attempts = 2, .backoff_ms = 1});
  CHECK_THROWS_AS(impatient.complete(one_message("q")), TransportError);

  LocalServer bad([](const httplib::Request&, httplib::Response& res) { res.status = 400; });
  HttpLMClient strict({.endpoint = bad.url(), .key_env = "", .max_attempts = 3, .backoff_ms = 1});
  CHECK_THROWS_WITH_AS(strict.complete(one_message("q")), doctest::Contains("HTTP 400 after 1"), TransportError);
}

TEST_CASE("http client rejects bad endpoints and unreachable hosts") {
  CHECK_THROWS_AS(HttpLMClient({.endpoint = "localhost:80/x"}), InvalidArgument);
  CHECK_THROWS_AS(HttpLMClient({.endpoint = "ftp://x/y"}), InvalidArgument);
  HttpLMClient dead({.endpoint = "http://127.0.0.1:1/v1", .key_env = "", .max_attempts = 2, .backoff_ms = 1});
  CHECK_THROWS_WITH_AS(dead.complete(one_message("q")), doctest::Contains("after 2 attempt"), TransportError);
}

TEST_CASE("echo-gold stub drives evaluation to full exact match") {
  const auto rows = synthetic_corpus(Task::kAssertion, {.size = 30, .seed = 4});
  const KnowledgeBase kb(rows);
  StubLMClient lm(StubLMClient::echo_gold(gold_of(rows)));
  const auto report = evaluate(kb, rows, Task::kAssertion, lm, keep_all, {.shots = 2});
  CHECK(report.metric == 100.0);
  CHECK(report.failures.empty());
  CHECK(lm.calls() == 30);
  CHECK(report.mean_removed_fraction == 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(report.predictions[i] == rows[i].answer);
    CHECK(report.token_counts[i] > 0);
  }
}

TEST_CASE("evaluation is order-stable across concurrency levels") {
  const auto rows = synthetic_corpus(Task::kBugs2Fix, {.size = 25, .seed = 8});
  const KnowledgeBase kb(rows);
  StubLMClient lm([](const ChatRequest& req) { return std::to_string(req.messages[0].content.size()); });
  const auto serial = evaluate(kb, rows, Task::kBugs2Fix, lm, keep_all, {.shots = 1, .concurrency = 1});
  const auto parallel = evaluate(kb, rows, Task::kBugs2Fix, lm, keep_all, {.shots = 1, .concurrency = 8});
  CHECK(serial.predictions == parallel.predictions);
  CHECK(serial.token_counts == parallel.token_counts);
}

TEST_CASE("shots exclude the question itself and zero shots asks the question alone") {
  const auto rows = synthetic_corpus(Task::kSuggestion, {.size = 6, .seed = 2});
  const KnowledgeBase kb(rows);
  const auto bundle = build_prompt(kb, rows[0], Task::kSuggestion, keep_all, {.shots = 5});
  CHECK(bundle.shots.size() == 5);
  for (const auto& shot : bundle.shots) CHECK(shot.find(rows[0].answer) == std::string::npos);
  const auto bare = build_prompt(kb, rows[0], Task::kSuggestion, keep_all, {.shots = 0});
  CHECK(bare.shots.empty());
  CHECK(bare.token_count < bundle.token_count);
  CHECK_THROWS_AS(build_prompt(kb, rows[0], Task::kSuggestion, keep_all, {.shots = -1}), InvalidArgument);
}

TEST_CASE("suggestion metric is the BLEU proxy") {
  CHECK(task_metric(Task::kSuggestion, {"a b c d"}, {"a b c d"}) == doctest::Approx(100.0));
  CHECK(task_metric(Task::kAssertion, {"a", "b"}, {"a", "c"}) == 50.0);
}

TEST_CASE("strip_type deletes exactly the labeled tokens") {
  const std::string code = "int f(int a) { if (a > 0) { return g(a); } return a; }";
  const auto table = PriorityTable::default_for(Task::kAssertion);
  const auto typed = classify_source(code, table);
  for (TypeLabel t : kRankedTypes) {
    const auto r = strip_type(code, t, table);
    std::vector<std::string> expect;
    std::size_t removed = 0;
    for (std::size_t i = 0; i < typed.labels.size(); ++i) {
      if (typed.labels[i] == t) {
        ++removed;
      } else {
        expect.push_back(typed.stream.countable_at(i).text);
      }
    }
    CHECK(r.removed_tokens == removed);
    CHECK(r.original_tokens == typed.stream.length());
    CHECK(lex(r.text).countable_texts() == expect);
  }
}

TEST_CASE("echo stub ablation shows no degradation and ranks by removed fraction") {
  const auto rows = synthetic_corpus(Task::kAssertion, {.size = 12, .seed = 6});
  StubLMClient lm(StubLMClient::echo_gold(gold_of(rows)));
  const auto records = run_ablation(rows, Task::kAssertion, lm);
  REQUIRE(records.size() == kNumRankedTypes);
  for (const auto& r : records) {
    CHECK(r.metric_full == 100.0);
    CHECK(r.metric_ablated == 100.0);
    CHECK(relative_degradation(r) == kDegradationFloor);
    CHECK(r.tau_code_t > 0.0);
  }
  const auto table = build_table(records);
  for (const auto& a : records) {
    for (const auto& b : records) {
      if (a.tau_code_t > b.tau_code_t) CHECK(table.rank(a.type_removed) < table.rank(b.type_removed));
    }
  }
}

TEST_CASE("overlap-oracle ablation matches an independent recomputation") {
  const auto rows = synthetic_corpus(Task::kAssertion, {.size = 10, .seed = 21});
  auto gold_terms = [](const std::string& answer) {
    const auto t = lex(answer).countable_texts();
    return std::set<std::string>(t.begin(), t.end());
  };
  auto verdict = [&](const std::set<std::string>& seen, const std::string& answer) {
    const auto gold = gold_terms(answer);
    std::size_t hit = 0;
    for (const auto& g : gold) hit += seen.count(g);
    return 2 * hit >= gold.size();
  };
  const auto gold = gold_of(rows);
  // The stub sees only the first demonstration's code sections.
  StubLMClient lm([&](const ChatRequest& req) {
    std::set<std::string> seen;
    int blocks = 0;
    for (const auto& [header, body] : parse_sections(req.messages[0].content)) {
      if (header == "FOCAL_METHOD") ++blocks;
      if (blocks == 1 && (header == "FOCAL_METHOD" || header == "UNIT_TEST")) {
        for (const auto& t : lex(body).countable_texts()) seen.insert(t);
      }
    }
    const auto& answer = gold.at(req.tag);
    return verdict(seen, answer) ? answer : std::string("fail();");
  });
  const auto records = run_ablation(rows, Task::kAssertion, lm, {.shots = 1, .concurrency = 3});

  const KnowledgeBase kb(rows);
  const auto table = PriorityTable::default_for(Task::kAssertion);
  auto recompute = [&](std::optional<TypeLabel> type, double* tau) {
    std::size_t correct = 0, parts = 0;
    double fraction = 0.0;
    for (const auto& q : rows) {
      const KbEntry* shot = nullptr;
      for (const auto& hit : kb.retrieve(q.query, 2)) {
        if (kb.entries()[hit.index].id != q.id) {
          shot = &kb.entries()[hit.index];
          break;
        }
      }
      std::set<std::string> seen;
      for (const auto& code : shot->code) {
        const auto typed = classify_source(code, table);
        std::size_t removed = 0;
        for (std::size_t i = 0; i < typed.labels.size(); ++i) {
          if (type && typed.labels[i] == *type) {
            ++removed;
          } else {
            seen.insert(typed.stream.countable_at(i).text);
          }
        }
        fraction += static_cast<double>(removed) / static_cast<double>(typed.stream.length());
        ++parts;
      }
      correct += verdict(seen, q.answer);
    }
    if (tau) *tau = fraction / static_cast<double>(parts);
    return 100.0 * static_cast<double>(correct) / static_cast<double>(rows.size());
  };
  const double full = recompute(std::nullopt, nullptr);
  REQUIRE(records.size() == kNumRankedTypes);
  bool any_drop = false;
  for (const auto& r : records) {
    double tau = 0.0;
    const double ablated = recompute(r.type_removed, &tau);
    CHECK(r.metric_full == doctest::Approx(full).epsilon(1e-12));
    CHECK(r.metric_ablated == doctest::Approx(ablated).epsilon(1e-12));
    CHECK(r.tau_code_t == doctest::Approx(tau).epsilon(1e-12));
    any_drop = any_drop || ablated < full;
  }
  CHECK(any_drop);
}

TEST_CASE("ablation rejects empty corpora and zero shots") {
  StubLMClient lm([](const ChatRequest&) { return std::string(); });
  CHECK_THROWS_AS(run_ablation({}, Task::kAssertion, lm), InvalidArgument);
  const auto rows = synthetic_corpus(Task::kAssertion, {.size = 3, .seed = 1});
  CHECK_THROWS_AS(run_ablation(rows, Task::kAssertion, lm, {.shots = 0}), InvalidArgument);
}

TEST_CASE("transport failures surface per query and completed records persist") {
  const auto rows = synthetic_corpus(Task::kAssertion, {.size = 10, .seed = 3});
  std::atomic<int> calls{0};
  StubLMClient lm([&](const ChatRequest& req) -> std::string {
    if (++calls > 50 && req.tag == rows[7].id) throw TransportError("connection reset after 3 attempt(s)");
    return "x";
  });
  const auto path = (std::filesystem::temp_directory_path() / "codezip_ablation_partial.jsonl").string();
  std::string message;
  try {
    run_ablation(rows, Task::kAssertion, lm, {.shots = 1, .concurrency = 1, .persist_path = path});
  } catch (const TransportError& e) {
    message = e.what();
  }
  CHECK(message.find("1 LM call(s) failed during the Structure run") != std::string::npos);
  CHECK(message.find(rows[7].id) != std::string::npos);
  CHECK(message.find("3 attempt") != std::string::npos);
  const auto saved = load_ablation_records(path);
  REQUIRE(saved.size() == 4);
  CHECK(saved[0].type_removed == TypeLabel::kSymbol);
  CHECK(saved[3].type_removed == TypeLabel::kIdentifier);
}

TEST_CASE("ablation records round-trip through JSONL") {
  const AblationRecord r{Task::kBugs2Fix, TypeLabel::kInvocation, 0.125, 61.5, 40.25};
  const auto back = parse_ablation_record(ablation_record_json(r), 1);
  CHECK(back.task == r.task);
  CHECK(back.type_removed == r.type_removed);
  CHECK(back.tau_code_t == r.tau_code_t);
  CHECK(back.metric_full == r.metric_full);
  CHECK(back.metric_ablated == r.metric_ablated);
  CHECK_THROWS_AS(parse_ablation_record(R"({"task":"ASSERTION","type":"OutOfType"})", 4), FormatError);
  CHECK_THROWS_WITH(parse_ablation_record("{", 9), doctest::Contains("line 9"));
}
