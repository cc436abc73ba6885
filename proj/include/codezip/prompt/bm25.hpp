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

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace codezip::prompt {

/// One knowledge-base row: retrieval text, the example's input code parts
/// (one per input section of the task template) and its answer.
struct KbEntry {
  std::string id;
  std::string query;
  std::vector<std::string> code;
  std::string answer;

  bool operator==(const KbEntry&) const = default;
};

/// Reads KB rows from JSONL `{id, query, code, answer}`; `code` may be a
/// string or an array of strings. Throws FormatError with the line number.
std::vector<KbEntry> load_kb_jsonl(const std::string& path);
KbEntry parse_kb_row(std::string_view line, std::size_t line_no);
std::string kb_row_json(const KbEntry& entry);

/// Lower-cased terms split on non-alphanumerics and camelCase boundaries:
/// "getHTTPServer_v2" -> get, http, server, v2.
std::vector<std::string> bm25_terms(std::string_view text);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct ScoredEntry {
  std::size_t index = 0;
  double score = 0.0;
};

/// Okapi BM25 over the entries' query text, with idf = ln(1 + (N - n + 0.5) / (n + 0.5)).
/// Immutable after construction.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  explicit KnowledgeBase(std::vector<KbEntry> entries, Bm25Params params = {});

  const std::vector<KbEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  double avgdl() const { return avgdl_; }
  const Bm25Params& params() const { return params_; }

  double idf(std::string_view term) const;
  /// Score of entry `index` against the query; each query term occurrence
  /// contributes.
  double score(std::string_view query, std::size_t index) const;

  /// Top-n entries, scores descending, ties by id ascending. n larger than
  /// the KB returns every entry. Throws InvalidArgument for n < 0.
  std::vector<ScoredEntry> retrieve(std::string_view query, long n) const;

  /// Single binary file: magic "CZBM25", version byte, params, entries and
  /// postings.
  void save(const std::string& path) const;
  static KnowledgeBase load(const std::string& path);

 private:
  struct Posting {
    std::uint32_t doc;
    std::uint32_t tf;
  };

  std::vector<KbEntry> entries_;
  Bm25Params params_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::vector<std::uint32_t> doc_len_;
  double avgdl_ = 0.0;
};

}  // namespace codezip::prompt
