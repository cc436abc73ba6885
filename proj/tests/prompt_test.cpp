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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "codezip/error.hpp"
#include "codezip/prompt/bm25.hpp"
#include "codezip/prompt/metrics.hpp"
#include "codezip/prompt/template.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace codezip;
using namespace codezip::prompt;

namespace {

std::vector<KbEntry> toy_corpus() {
  return {
      {"d1", "get user name", {"String getUserName() { return name; }"}, "a1"},
      {"d2", "set user name value", {"void setUserName(String v) { name = v; }"}, "a2"},
      {"d3", "parse int value value", {"int parse(String s) { return 0; }"}, "a3"},
      {"d4", "close stream", {"void close() { }"}, "a4"},
      {"d5", "user user user session", {"void s() { }"}, "a5"},
  };
}

// Direct BM25 over pre-split term lists, written without the index.
double oracle_bm25(const std::vector<std::vector<std::string>>& docs, const std::vector<std::string>& q,
                   std::size_t d) {
  const double k1 = 1.2, b = 0.75;
  double avgdl = 0;
  for (const auto& doc : docs) avgdl += doc.size();
  avgdl /= docs.size();
  double s = 0;
  for (const auto& term : q) {
    double n = 0;
    for (const auto& doc : docs) n += std::count(doc.begin(), doc.end(), term) > 0;
    const double idf = std::log(1 + (docs.size() - n + 0.5) / (n + 0.5));
    const double f = std::count(docs[d].begin(), docs[d].end(), term);
    s += idf * f * (k1 + 1) / (f + k1 * (1 - b + b * docs[d].size() / avgdl));
  }
  return s;
}

}  // namespace

TEST_CASE("bm25 tokenization") {
  CHECK(bm25_terms("getHTTPServer_v2(x)") == std::vector<std::string>{"get", "http", "server", "v2", "x"});
  CHECK(bm25_terms("java.util.Calendar") == std::vector<std::string>{"java", "util", "calendar"});
  CHECK(bm25_terms("").empty());
}

TEST_CASE("bm25 matches a direct recomputation on a 5-document corpus") {
  KnowledgeBase kb(toy_corpus());
  std::vector<std::vector<std::string>> docs;
  for (const auto& e : kb.entries()) docs.push_back(bm25_terms(e.query));
  CHECK(kb.avgdl() == doctest::Approx(17.0 / 5.0));
  for (const std::string q : {"user name", "value", "user", "close the stream", "nothing here"}) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      CHECK(std::abs(kb.score(q, d) - oracle_bm25(docs, bm25_terms(q), d)) < 1e-9);
    }
  }
  // One fully hand-worked value: query "close" against d4 (|d|=2, avgdl=3.4,
  // n=1, N=5): idf = ln(1 + 4.5/1.5) = ln 4; tf term = 2.2 / (1 + 1.2*(0.25 + 0.75*2/3.4)).
  const double hand = std::log(4.0) * 2.2 / (1.0 + 1.2 * (0.25 + 0.75 * 2.0 / 3.4));
  CHECK(std::abs(kb.score("close", 3) - hand) < 1e-12);
}

TEST_CASE("bm25 retrieval order, ties and bounds") {
  KnowledgeBase kb(toy_corpus());
  auto top = kb.retrieve("set user name value", 1);
  REQUIRE(top.size() == 1);
  CHECK(kb.entries()[top[0].index].id == "d2");
  CHECK(kb.retrieve("user", 100).size() == 5);
  CHECK(kb.retrieve("user", 0).empty());
  CHECK_THROWS_AS(kb.retrieve("user", -1), InvalidArgument);
  // No overlap: all zero, ordered by id.
  auto none = kb.retrieve("zzz", 5);
  for (std::size_t i = 0; i < none.size(); ++i) CHECK(kb.entries()[none[i].index].id == "d" + std::to_string(i + 1));
  auto all = kb.retrieve("user name value", 5);
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].score >= all[i].score);
}

TEST_CASE("bm25 score does not drop when a matching term is added at fixed length") {
  // Swap a non-matching term for a matching one; document length unchanged.
  std::vector<KbEntry> a = toy_corpus(), b = toy_corpus();
  b[3].query = "close close";
  KnowledgeBase ka(a), kb2(b);
  CHECK(kb2.score("close", 3) >= ka.score("close", 3));
}

TEST_CASE("bm25 index persists to a binary file") {
  KnowledgeBase kb(toy_corpus());
  const auto path = std::filesystem::temp_directory_path() / "codezip_bm25_test.idx";
  kb.save(path.string());
  auto back = KnowledgeBase::load(path.string());
  CHECK(back.entries() == kb.entries());
  CHECK(back.score("user name", 1) == kb.score("user name", 1));
  {
    std::ofstream bad(path, std::ios::binary | std::ios::trunc);
    bad << "NOTANINDEX";
  }
  CHECK_THROWS_AS(KnowledgeBase::load(path.string()), FormatError);
  std::filesystem::remove(path);
}

TEST_CASE("kb JSONL rows") {
  auto e = parse_kb_row(R"({"id":"x","query":"q","code":["a","b"],"answer":"c"})", 1);
  CHECK(e.code == std::vector<std::string>{"a", "b"});
  CHECK(parse_kb_row(kb_row_json(e), 1) == e);
  CHECK(parse_kb_row(R"({"id":"x","query":"q","code":"a","answer":"c"})", 1).code.size() == 1);
  CHECK_THROWS_AS(parse_kb_row(R"({"id":"x","query":"q","answer":"c"})", 3), FormatError);
  CHECK_THROWS_AS(parse_kb_row(R"({"id":"x","query":"q","code":"a","answer":"c","extra":1})", 3), FormatError);
  CHECK_THROWS_AS(parse_kb_row("{not json", 3), FormatError);
}

TEST_CASE("assemble: zero shots is the question alone") {
  auto b = assemble(Task::kBugs2Fix, {}, {"void f() { }"});
  CHECK(b.shots.empty());
  auto sections = parse_sections(b.rendered);
  REQUIRE(sections.size() == 2);
  CHECK(sections[0].first == "BUGGY_CODE");
  CHECK(sections[0].second == "void f() { }");
  CHECK(sections[1].first == "FIXED_CODE");
  CHECK(sections[1].second.empty());
}

TEST_CASE("assemble: one assertion shot renders FOCAL_METHOD then UNIT_TEST") {
  const auto listing = testing::read_file(testing::data_path("fixtures/jsoar_assertion.java"));
  const auto split = listing.find("testJustifications()");
  Shot shot{{listing.substr(0, split), listing.substr(split)}, "assertNotNull(j);"};
  auto b = assemble(Task::kAssertion, {shot}, {"int f() { return 1; }", "void t() { \"<AssertPlaceHolder>\"; }"});
  const auto focal = b.rendered.find("### FOCAL_METHOD\ngetProduction(java.lang.String) {");
  const auto unit = b.rendered.find("### UNIT_TEST\ntestJustifications() {");
  REQUIRE(focal != std::string::npos);
  REQUIRE(unit != std::string::npos);
  CHECK(focal < unit);
  CHECK(b.rendered.find("\"<AssertPlaceHolder>\"") != std::string::npos);
  auto sections = parse_sections(b.rendered);
  REQUIRE(sections.size() == 6);
  CHECK(sections[3].first == "FOCAL_METHOD");
  CHECK(sections[4].first == "UNIT_TEST");
  CHECK(sections[5].first == "ASSERTION");
  CHECK(sections[5].second.empty());
  CHECK(sections[2].second == "assertNotNull(j);");
  CHECK(b.token_count > 52);
}

TEST_CASE("assemble keeps shot order") {
  std::vector<Shot> shots = {{{"a"}, "1"}, {{"b"}, "2"}, {{"c"}, "3"}};
  auto b = assemble(Task::kBugs2Fix, shots, {"q"});
  CHECK(b.rendered.find("\na\n") < b.rendered.find("\nb\n"));
  CHECK(b.rendered.find("\nb\n") < b.rendered.find("\nc\n"));
  CHECK(b.rendered.find("\nc\n") < b.rendered.rfind("### BUGGY_CODE"));
}

TEST_CASE("exact match and corpus EM") {
  CHECK(exact_match("assertEquals(1, x);", "assertEquals(1, x);") == 1);
  CHECK(exact_match("  assertEquals(1,\n   x); ", "assertEquals(1, x);") == 1);
  CHECK(exact_match("assertEquals(1, y);", "assertEquals(1, x);") == 0);
  std::vector<std::string> p = {"a", "b", "c", "d"}, g = {"a", "b", "c", "x"};
  CHECK(corpus_em(p, g) == 75.0);
  CHECK_THROWS_AS(corpus_em(p, std::vector<std::string>{"a"}), InvalidArgument);
}

TEST_CASE("bleu4 proxy") {
  std::vector<std::string> gold = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
  CHECK(bleu4_proxy(gold, gold) == doctest::Approx(100.0));
  std::vector<std::string> disjoint = {"k", "l", "m", "n", "o", "p", "q", "r", "s", "t"};
  const double floor_score = bleu4_proxy(disjoint, gold);
  // Nothing matches: only the add-one floor remains.
  CHECK(floor_score == doctest::Approx(100.0 * std::pow((1.0 / 11) * (1.0 / 10) * (1.0 / 9) * (1.0 / 8), 0.25)));
  CHECK(floor_score < bleu4_proxy(std::vector<std::string>{"a", "l", "m", "n", "o", "p", "q", "r", "s", "t"}, gold));
  // a b c d x f g h i y against a..j. Matched/total n-grams by hand:
  //   1-grams 8/10, 2-grams 6/9, 3-grams 4/8, 4-grams 2/7; brevity penalty 1.
  std::vector<std::string> pred = {"a", "b", "c", "d", "x", "f", "g", "h", "i", "y"};
  const double hand = 100.0 * std::pow((9.0 / 11) * (7.0 / 10) * (5.0 / 9) * (3.0 / 8), 0.25);
  CHECK(bleu4_proxy(pred, gold) == doctest::Approx(hand).epsilon(1e-12));
  // Short prediction pays the brevity penalty exp(1 - 10/5).
  std::vector<std::string> half(gold.begin(), gold.begin() + 5);
  const double short_hand = 100.0 * std::exp(1.0 - 2.0) * std::pow(1.0 * (5.0 / 5) * (4.0 / 4) * (3.0 / 3) * (2.0 / 2), 0.25);
  CHECK(bleu4_proxy(half, gold) == doctest::Approx(short_hand));
  CHECK(bleu4_proxy(std::vector<std::string>{}, gold) == 0.0);
  CHECK(bleu4_proxy_text("return x ;", "return  x;") == doctest::Approx(100.0));
}
