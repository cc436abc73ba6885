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

#include "codezip/typer.hpp"

#include <limits>

namespace codezip {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

class Pass {
 public:
  Pass(const TokenStream& stream, const LanguageTables& tables)
      : stream_(stream), tables_(tables), n_(stream.length()), cand_(n_, 0), match_(n_, kNone) {}

  std::vector<CandidateSet> run() {
    match_brackets();
    symbols();
    const auto header_names = headers();
    invocations(header_names);
    structure();
    identifiers();
    return std::move(cand_);
  }

 private:
  const Token& tok(std::size_t i) const { return stream_.countable_at(i); }
  std::string_view text(std::size_t i) const {
    return i < n_ ? std::string_view(tok(i).text) : std::string_view();
  }
  bool is_ident(std::size_t i) const { return i < n_ && tok(i).kind == TokenKind::kIdentifier; }
  void mark(std::size_t i, TypeLabel t) { cand_[i] |= candidate_bit(t); }

  void match_brackets() {
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n_; ++i) {
      const auto t = text(i);
      if (tok(i).kind != TokenKind::kPunctuation) continue;
      if (t == "(" || t == "[" || t == "{") {
        stack.push_back(i);
      } else if (t == ")" || t == "]" || t == "}") {
        const std::string_view open = t == ")" ? "(" : t == "]" ? "[" : "{";
        // Pop through mismatches so one stray bracket does not poison the rest.
        while (!stack.empty() && text(stack.back()) != open) stack.pop_back();
        if (stack.empty()) continue;
        match_[stack.back()] = i;
        match_[i] = stack.back();
        stack.pop_back();
      }
    }
  }

  void symbols() {
    for (std::size_t i = 0; i < n_; ++i) {
      const auto k = tok(i).kind;
      if (k == TokenKind::kPunctuation || k == TokenKind::kOperator) mark(i, TypeLabel::kSymbol);
    }
  }

  // A token that may appear in the modifier/type prefix of a declaration.
  bool header_prefix_token(std::size_t i, int& angle_depth) const {
    const auto t = text(i);
    const auto k = tok(i).kind;
    if (k == TokenKind::kIdentifier) return true;
    if (k == TokenKind::kKeyword) return !tables_.is_structure(t);
    if (t == ">") return ++angle_depth, true;
    if (t == ">>") return angle_depth += 2, true;
    if (t == ">>>") return angle_depth += 3, true;
    if (t == "<") return --angle_depth, true;
    if (t == "." || t == "?" || t == "[" || t == "]" || t == "@" || t == "&") return true;
    if (t == ",") return angle_depth > 0;
    return false;
  }

  std::size_t header_start(std::size_t name) const {
    int depth = 0;
    std::size_t start = name;
    while (start > 0) {
      int probe = depth;
      if (!header_prefix_token(start - 1, probe)) break;
      depth = probe;
      --start;
    }
    return start;
  }

  bool declaration_like(std::size_t name) const {
    if (!is_ident(name) || text(name + 1) != "(") return false;
    if (name > 0 && (text(name - 1) == "." || text(name - 1) == "new")) return false;
    const std::size_t close = match_[name + 1];
    if (close == kNone) return false;
    const auto after = text(close + 1);
    if (after == "{" || after == "throws") return true;
    if (after == ";" && name > 0) {
      // Abstract / interface method: a type must precede the name.
      const auto& prev = tok(name - 1);
      const auto pt = text(name - 1);
      if (prev.kind == TokenKind::kIdentifier) return true;
      if (prev.kind == TokenKind::kKeyword && !tables_.is_structure(pt)) return true;
      return pt == ">" || pt == ">>" || pt == ">>>" || pt == "]";
    }
    return false;
  }

  void mark_header(std::size_t name, std::size_t end) {
    for (std::size_t i = header_start(name); i <= end && i < n_; ++i) mark(i, TypeLabel::kSignature);
  }

  std::vector<bool> headers() {
    std::vector<bool> is_name(n_, false);
    bool found = false;
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (!declaration_like(i)) continue;
      is_name[i] = true;
      found = true;
      mark_header(i, match_[i + 1]);
    }
    if (found) return is_name;

    // Fallback for fragments: first `name(` before the first `{`. Code with
    // no block at all (a bare statement) has no header.
    std::size_t first_brace = 0;
    while (first_brace < n_ && text(first_brace) != "{") ++first_brace;
    if (first_brace == n_) return is_name;
    for (std::size_t i = 0; i + 1 < first_brace; ++i) {
      if (!is_ident(i) || text(i + 1) != "(") continue;
      if (i > 0 && (text(i - 1) == "." || text(i - 1) == "new")) continue;
      std::size_t end = match_[i + 1];
      if (end == kNone) {
        end = i + 1;
        while (end + 1 < n_ && text(end + 1) != "{") ++end;
      }
      is_name[i] = true;
      mark_header(i, end);
      break;
    }
    return is_name;
  }

  void invocations(const std::vector<bool>& header_names) {
    called_.assign(n_, false);
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (!is_ident(i) || text(i + 1) != "(" || header_names[i]) continue;
      if (i > 0 && text(i - 1) == "new") continue;
      called_[i] = true;
      mark(i, TypeLabel::kInvocation);
      // Receiver chain: `a.b().c(` marks a . b . c
      std::size_t k = i;
      while (k >= 2 && text(k - 1) == ".") {
        mark(k - 1, TypeLabel::kInvocation);
        std::size_t r = k - 2;
        if ((text(r) == ")" || text(r) == "]") && match_[r] != kNone && match_[r] > 0) {
          r = match_[r] - 1;
        }
        const bool name = is_ident(r) || text(r) == "this" || text(r) == "super";
        if (!name) break;
        mark(r, TypeLabel::kInvocation);
        k = r;
      }
    }
  }

  void structure() {
    // Braces opening an array initializer are plain symbols; all other braces
    // delimit blocks.
    std::vector<bool> initializer_stack;
    for (std::size_t i = 0; i < n_; ++i) {
      const auto t = text(i);
      if (tok(i).kind == TokenKind::kKeyword && tables_.is_structure(t)) mark(i, TypeLabel::kStructure);
      if (tok(i).kind == TokenKind::kKeyword && tables_.is_control(t) && text(i + 1) == "(") {
        mark(i + 1, TypeLabel::kStructure);
        if (match_[i + 1] != kNone) mark(match_[i + 1], TypeLabel::kStructure);
      }
      if (t == "{") {
        const auto prev = i > 0 ? text(i - 1) : std::string_view();
        const bool in_init = !initializer_stack.empty() && initializer_stack.back();
        const bool init = prev == "=" || prev == "]" || (in_init && (prev == "," || prev == "{"));
        initializer_stack.push_back(init);
        if (!init) {
          mark(i, TypeLabel::kStructure);
          if (match_[i] != kNone) mark(match_[i], TypeLabel::kStructure);
        }
      } else if (t == "}" && !initializer_stack.empty()) {
        initializer_stack.pop_back();
      }
    }
  }

  void identifiers() {
    for (std::size_t i = 0; i < n_; ++i) {
      if (is_ident(i) && !called_[i]) mark(i, TypeLabel::kIdentifier);
    }
  }

  const TokenStream& stream_;
  const LanguageTables& tables_;
  std::size_t n_;
  std::vector<CandidateSet> cand_;
  std::vector<std::size_t> match_;
  std::vector<bool> called_;
};

TypeLabel resolve(CandidateSet set, const PriorityTable& table) {
  TypeLabel best = TypeLabel::kOutOfType;
  int best_rank = 0;
  for (auto t : kRankedTypes) {
    if (!(set & candidate_bit(t))) continue;
    // Highest rank number = lowest removal priority = protected longest.
    if (table.rank(t) > best_rank) {
      best_rank = table.rank(t);
      best = t;
    }
  }
  return best;
}

}  // namespace

std::size_t TypedStream::tf_of(std::size_t countable_index) const {
  auto it = tf.find(stream.countable_at(countable_index).text);
  return it == tf.end() ? 0 : it->second;
}

TypedStream classify(const TokenStream& stream, const PriorityTable& table,
                     const LanguageTables& tables) {
  TypedStream out;
  out.stream = stream;
  out.candidates = Pass(stream, tables).run();
  out.labels.reserve(out.candidates.size());
  for (auto set : out.candidates) out.labels.push_back(resolve(set, table));
  for (std::size_t i = 0; i < stream.length(); ++i) ++out.tf[stream.countable_at(i).text];
  return out;
}

TypedStream classify_source(std::string_view source, const PriorityTable& table,
                            const LanguageTables& tables) {
  return classify(lex(source, tables), table, tables);
}

}  // namespace codezip
