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

#include "codezip/prompt/bm25.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "codezip/error.hpp"
#include "json.hpp"

namespace codezip::prompt {

using nlohmann::json;

KbEntry parse_kb_row(std::string_view line, std::size_t line_no) {
  auto fail = [&](const std::string& what) {
    return FormatError("kb line " + std::to_string(line_no) + ": " + what);
  };
  json row;
  try {
    row = json::parse(line);
  } catch (const json::parse_error& e) {
    throw fail(std::string("invalid JSON: ") + e.what());
  }
  if (!row.is_object()) throw fail("expected an object");
  KbEntry entry;
  for (const char* key : {"id", "query", "answer"}) {
    if (!row.contains(key) || !row[key].is_string()) throw fail(std::string("field '") + key + "' must be a string");
  }
  entry.id = row["id"].get<std::string>();
  entry.query = row["query"].get<std::string>();
  entry.answer = row["answer"].get<std::string>();
  if (!row.contains("code")) throw fail("missing field 'code'");
  const auto& code = row["code"];
  if (code.is_string()) {
    entry.code.push_back(code.get<std::string>());
  } else if (code.is_array()) {
    for (const auto& part : code) {
      if (!part.is_string()) throw fail("field 'code' entries must be strings");
      entry.code.push_back(part.get<std::string>());
    }
  } else {
    throw fail("field 'code' must be a string or array of strings");
  }
  for (const auto& [key, _] : row.items()) {
    if (key != "id" && key != "query" && key != "code" && key != "answer") throw fail("unknown field '" + key + "'");
  }
  return entry;
}

std::vector<KbEntry> load_kb_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read knowledge base '" + path + "'");
  std::vector<KbEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_kb_row(line, line_no));
  }
  return out;
}

std::string kb_row_json(const KbEntry& entry) {
  json row = json::object();
  row["id"] = entry.id;
  row["query"] = entry.query;
  if (entry.code.size() == 1) {
    row["code"] = entry.code.front();
  } else {
    row["code"] = entry.code;
  }
  row["answer"] = entry.answer;
  return row.dump();
}

std::vector<std::string> bm25_terms(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (!std::isalnum(c)) {
      flush();
      continue;
    }
    if (std::isupper(c) && !cur.empty()) {
      const auto prev = static_cast<unsigned char>(text[i - 1]);
      const bool next_lower = i + 1 < text.size() && std::islower(static_cast<unsigned char>(text[i + 1]));
      // fooBar | HTTPServer -> HTTP + Server
      if (std::islower(prev) || std::isdigit(prev) || (std::isupper(prev) && next_lower)) flush();
    }
    cur += static_cast<char>(std::tolower(c));
  }
  flush();
  return out;
}

KnowledgeBase::KnowledgeBase(std::vector<KbEntry> entries, Bm25Params params)
    : entries_(std::move(entries)), params_(params) {
  std::size_t total = 0;
  for (std::size_t d = 0; d < entries_.size(); ++d) {
    const auto terms = bm25_terms(entries_[d].query);
    doc_len_.push_back(static_cast<std::uint32_t>(terms.size()));
    total += terms.size();
    std::map<std::string, std::uint32_t> tf;
    for (const auto& t : terms) ++tf[t];
    for (const auto& [t, f] : tf) postings_[t].push_back({static_cast<std::uint32_t>(d), f});
  }
  avgdl_ = entries_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(entries_.size());
}

double KnowledgeBase::idf(std::string_view term) const {
  auto it = postings_.find(std::string(term));
  const double n = it == postings_.end() ? 0.0 : static_cast<double>(it->second.size());
  const double big_n = static_cast<double>(entries_.size());
  return std::log(1.0 + (big_n - n + 0.5) / (n + 0.5));
}

double KnowledgeBase::score(std::string_view query, std::size_t index) const {
  double s = 0.0;
  if (avgdl_ <= 0.0) return s;
  const double norm = params_.k1 * (1.0 - params_.b + params_.b * doc_len_[index] / avgdl_);
  for (const auto& term : bm25_terms(query)) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    auto p = std::lower_bound(it->second.begin(), it->second.end(), index,
                              [](const Posting& post, std::size_t d) { return post.doc < d; });
    if (p == it->second.end() || p->doc != index) continue;
    const double f = p->tf;
    s += idf(term) * f * (params_.k1 + 1.0) / (f + norm);
  }
  return s;
}

std::vector<ScoredEntry> KnowledgeBase::retrieve(std::string_view query, long n) const {
  if (n < 0) throw InvalidArgument("retrieve: n must be >= 0");
  std::vector<ScoredEntry> scored;
  scored.reserve(entries_.size());
  for (std::size_t d = 0; d < entries_.size(); ++d) scored.push_back({d, score(query, d)});
  std::sort(scored.begin(), scored.end(), [&](const ScoredEntry& a, const ScoredEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return entries_[a.index].id < entries_[b.index].id;
  });
  if (static_cast<std::size_t>(n) < scored.size()) scored.resize(static_cast<std::size_t>(n));
  return scored;
}

namespace {

constexpr char kMagic[6] = {'C', 'Z', 'B', 'M', '2', '5'};
constexpr std::uint8_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}
void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u32(out, static_cast<std::uint32_t>(bits));
  put_u32(out, static_cast<std::uint32_t>(bits >> 32));
}
void put_str(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError("bm25 index: truncated file");
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}
double get_f64(std::istream& in) {
  std::uint64_t lo = get_u32(in);
  std::uint64_t hi = get_u32(in);
  const std::uint64_t bits = lo | (hi << 32);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}
std::string get_str(std::istream& in) {
  const auto n = get_u32(in);
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), n)) throw FormatError("bm25 index: truncated string");
  return s;
}

}  // namespace

void KnowledgeBase::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write bm25 index '" + path + "'");
  out.write(kMagic, sizeof kMagic);
  out.put(static_cast<char>(kVersion));
  put_f64(out, params_.k1);
  put_f64(out, params_.b);
  put_u32(out, static_cast<std::uint32_t>(entries_.size()));
  for (const auto& e : entries_) {
    put_str(out, e.id);
    put_str(out, e.query);
    put_u32(out, static_cast<std::uint32_t>(e.code.size()));
    for (const auto& c : e.code) put_str(out, c);
    put_str(out, e.answer);
  }
  // Postings sorted by term so the file is byte-stable.
  std::vector<const std::string*> terms;
  for (const auto& [t, _] : postings_) terms.push_back(&t);
  std::sort(terms.begin(), terms.end(), [](auto* a, auto* b) { return *a < *b; });
  put_u32(out, static_cast<std::uint32_t>(terms.size()));
  for (const auto* t : terms) {
    put_str(out, *t);
    const auto& list = postings_.at(*t);
    put_u32(out, static_cast<std::uint32_t>(list.size()));
    for (const auto& p : list) {
      put_u32(out, p.doc);
      put_u32(out, p.tf);
    }
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

KnowledgeBase KnowledgeBase::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read bm25 index '" + path + "'");
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw FormatError("bm25 index: bad magic header");
  }
  const int version = in.get();
  if (version != kVersion) throw FormatError("bm25 index: unsupported version " + std::to_string(version));
  Bm25Params params;
  params.k1 = get_f64(in);
  params.b = get_f64(in);
  std::vector<KbEntry> entries(get_u32(in));
  for (auto& e : entries) {
    e.id = get_str(in);
    e.query = get_str(in);
    e.code.resize(get_u32(in));
    for (auto& c : e.code) c = get_str(in);
    e.answer = get_str(in);
  }
  KnowledgeBase kb(std::move(entries), params);
  // Stored postings must agree with the rebuilt ones.
  const auto n_terms = get_u32(in);
  if (n_terms != kb.postings_.size()) throw FormatError("bm25 index: postings do not match entries");
  for (std::uint32_t i = 0; i < n_terms; ++i) {
    const auto term = get_str(in);
    auto it = kb.postings_.find(term);
    const auto n = get_u32(in);
    if (it == kb.postings_.end() || it->second.size() != n) {
      throw FormatError("bm25 index: postings for '" + term + "' do not match entries");
    }
    for (std::uint32_t k = 0; k < n; ++k) {
      const auto doc = get_u32(in);
      const auto tf = get_u32(in);
      if (it->second[k].doc != doc || it->second[k].tf != tf) {
        throw FormatError("bm25 index: postings for '" + term + "' do not match entries");
      }
    }
  }
  return kb;
}

}  // namespace codezip::prompt
