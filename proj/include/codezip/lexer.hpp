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

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "codezip/language.hpp"

namespace codezip {

enum class TokenKind {
  kIdentifier,
  kKeyword,
  kPunctuation,
  kOperator,
  kStringLiteral,
  kCharLiteral,
  kNumberLiteral,
  kComment,
  kWhitespace,
};

std::string_view token_kind_name(TokenKind kind);

/// Half-open byte range into the source.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool operator==(const Span&) const = default;
};

struct Token {
  std::string text;
  Span span;
  TokenKind kind = TokenKind::kPunctuation;

  /// Countable tokens are everything except whitespace and comments. Ratios
  /// are always measured over countable tokens.
  bool countable() const { return kind != TokenKind::kWhitespace && kind != TokenKind::kComment; }
};

enum class ParseStatus { kParsable, kUnparsable };

/// Lossless token stream: concatenating every token's text gives back the
/// source byte-for-byte.
class TokenStream {
 public:
  TokenStream() = default;
  TokenStream(std::string source, std::vector<Token> tokens, ParseStatus status);

  const std::string& source() const { return source_; }
  const std::vector<Token>& tokens() const { return tokens_; }
  ParseStatus parse_status() const { return status_; }
  bool parsable() const { return status_ == ParseStatus::kParsable; }

  /// Indices into tokens() of the countable tokens, in source order.
  const std::vector<std::size_t>& countable() const { return countable_; }
  /// L: number of countable tokens.
  std::size_t length() const { return countable_.size(); }
  const Token& countable_at(std::size_t i) const { return tokens_[countable_[i]]; }

  /// Texts of the countable tokens, in order.
  std::vector<std::string> countable_texts() const;

 private:
  std::string source_;
  std::vector<Token> tokens_;
  std::vector<std::size_t> countable_;
  ParseStatus status_ = ParseStatus::kUnparsable;
};

bool is_valid_utf8(std::string_view bytes);

/// Lexes Java-like source. Total: malformed input (unterminated literals,
/// stray bytes) still yields a stream, with stray bytes as one-character
/// punctuation tokens. The parse status is a structural heuristic: brackets
/// balance, every literal and block comment terminates, the code ends in `}`
/// or `;`, and at least one method header `name(...) {` is present.
TokenStream lex(std::string_view source, const LanguageTables& tables = LanguageTables::java());

/// True for a string or char literal that was cut off before its closing
/// quote.
bool unterminated_literal(const Token& token);

/// Renders the kept countable tokens (indices into stream.tokens()) in source
/// order separated by single spaces. Whitespace and comments never appear in
/// the output. An unterminated literal is followed by a newline instead of a
/// space so the output re-lexes to the same tokens.
std::string detokenize(const TokenStream& stream, std::span<const std::size_t> kept);

/// detokenize with every token kept.
std::string detokenize(const TokenStream& stream);

/// Joins token texts with single spaces.
std::string join_tokens(std::span<const std::string> tokens);

/// Collapses whitespace runs to one space and trims both ends.
std::string normalize_whitespace(std::string_view text);

}  // namespace codezip
