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

#include "codezip/lexer.hpp"

#include <array>
#include <optional>

namespace codezip {
namespace {

// Longest first; the scanner takes the first match.
constexpr std::array<std::string_view, 26> kOperators = {
    ">>>=", "<<=", ">>=", ">>>", "->", "++", "--", "&&", "||", "==", "!=", "<=", ">=",
    "+=",   "-=",  "*=",  "/=",  "%=", "&=", "|=", "^=", "<<", ">>", "=",  "+",  "-"};
constexpr std::string_view kSingleOperators = "*/%&|^!~?:<>";

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}
bool is_ident_part(unsigned char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

class Scanner {
 public:
  Scanner(std::string_view src, const LanguageTables& tables) : src_(src), tables_(tables) {}

  std::vector<Token> run() {
    while (pos_ < src_.size()) next();
    return std::move(tokens_);
  }

  bool clean() const { return clean_; }

 private:
  void emit(std::size_t start, TokenKind kind) {
    tokens_.push_back(Token{std::string(src_.substr(start, pos_ - start)), Span{start, pos_}, kind});
  }

  unsigned char at(std::size_t i) const {
    return i < src_.size() ? static_cast<unsigned char>(src_[i]) : 0;
  }

  bool starts_with(std::string_view s) const { return src_.substr(pos_).starts_with(s); }

  void next() {
    const std::size_t start = pos_;
    const unsigned char c = at(pos_);

    if (is_space(c)) {
      while (pos_ < src_.size() && is_space(at(pos_))) ++pos_;
      return emit(start, TokenKind::kWhitespace);
    }
    if (starts_with("//")) {
      while (pos_ < src_.size() && at(pos_) != '\n') ++pos_;
      return emit(start, TokenKind::kComment);
    }
    if (starts_with("/*")) {
      auto close = src_.find("*/", pos_ + 2);
      if (close == std::string_view::npos) {
        clean_ = false;
        pos_ = src_.size();
      } else {
        pos_ = close + 2;
      }
      return emit(start, TokenKind::kComment);
    }
    if (starts_with("\"\"\"")) {
      auto close = src_.find("\"\"\"", pos_ + 3);
      if (close == std::string_view::npos) {
        clean_ = false;
        pos_ = src_.size();
      } else {
        pos_ = close + 3;
      }
      return emit(start, TokenKind::kStringLiteral);
    }
    if (c == '"' || c == '\'') {
      quoted(c);
      return emit(start, c == '"' ? TokenKind::kStringLiteral : TokenKind::kCharLiteral);
    }
    if (is_digit(c) || (c == '.' && is_digit(at(pos_ + 1)))) {
      number();
      return emit(start, TokenKind::kNumberLiteral);
    }
    if (is_ident_start(c)) {
      while (pos_ < src_.size() && is_ident_part(at(pos_))) ++pos_;
      const bool kw = tables_.is_keyword(src_.substr(start, pos_ - start));
      return emit(start, kw ? TokenKind::kKeyword : TokenKind::kIdentifier);
    }
    if (starts_with("...") || starts_with("::")) {
      pos_ += starts_with("...") ? 3 : 2;
      return emit(start, TokenKind::kPunctuation);
    }
    for (std::string_view op : kOperators) {
      if (starts_with(op)) {
        pos_ += op.size();
        return emit(start, TokenKind::kOperator);
      }
    }
    ++pos_;
    if (kSingleOperators.find(static_cast<char>(c)) != std::string_view::npos) {
      return emit(start, TokenKind::kOperator);
    }
    // Separators ( ) { } [ ] ; , . @ and any byte we do not recognise.
    emit(start, TokenKind::kPunctuation);
  }

  void quoted(unsigned char quote) {
    ++pos_;
    while (pos_ < src_.size()) {
      const unsigned char c = at(pos_);
      if (c == '\\') {
        pos_ = std::min(pos_ + 2, src_.size());
        continue;
      }
      if (c == '\n') break;
      ++pos_;
      if (c == quote) return;
    }
    clean_ = false;
  }

  void number() {
    const bool hex = at(pos_) == '0' && (at(pos_ + 1) == 'x' || at(pos_ + 1) == 'X');
    while (pos_ < src_.size()) {
      const unsigned char c = at(pos_);
      if (is_ident_part(c) && c < 0x80) {
        const bool exponent = hex ? (c == 'p' || c == 'P') : (c == 'e' || c == 'E');
        ++pos_;
        if (exponent && (at(pos_) == '+' || at(pos_) == '-')) ++pos_;
      } else if (c == '.' && is_digit(at(pos_ + 1))) {
        ++pos_;
      } else if (c == '.' && !hex && at(pos_ + 1) != '.' && !is_ident_start(at(pos_ + 1))) {
        ++pos_;  // trailing dot: `1.`
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  const LanguageTables& tables_;
  std::size_t pos_ = 0;
  bool clean_ = true;
  std::vector<Token> tokens_;
};

bool balanced(const std::vector<Token>& tokens, const std::vector<std::size_t>& countable) {
  std::vector<char> stack;
  for (auto i : countable) {
    const auto& t = tokens[i];
    if (t.kind != TokenKind::kPunctuation || t.text.size() != 1) continue;
    const char c = t.text[0];
    if (c == '(' || c == '[' || c == '{') {
      stack.push_back(c);
    } else if (c == ')' || c == ']' || c == '}') {
      const char open = c == ')' ? '(' : c == ']' ? '[' : '{';
      if (stack.empty() || stack.back() != open) return false;
      stack.pop_back();
    }
  }
  return stack.empty();
}

bool has_method_header(const std::vector<Token>& tokens, const std::vector<std::size_t>& countable) {
  const auto text = [&](std::size_t ci) -> std::string_view {
    return ci < countable.size() ? std::string_view(tokens[countable[ci]].text) : std::string_view();
  };
  for (std::size_t i = 0; i + 1 < countable.size(); ++i) {
    if (tokens[countable[i]].kind != TokenKind::kIdentifier || text(i + 1) != "(") continue;
    if (i > 0 && (text(i - 1) == "new" || text(i - 1) == ".")) continue;
    int depth = 0;
    std::size_t j = i + 1;
    for (; j < countable.size(); ++j) {
      if (text(j) == "(") ++depth;
      if (text(j) == ")" && --depth == 0) break;
    }
    if (j < countable.size() && (text(j + 1) == "{" || text(j + 1) == "throws")) return true;
  }
  return false;
}

}  // namespace

std::string_view token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::kIdentifier:
      return "identifier";
    case TokenKind::kKeyword:
      return "keyword";
    case TokenKind::kPunctuation:
      return "punctuation";
    case TokenKind::kOperator:
      return "operator";
    case TokenKind::kStringLiteral:
      return "string-literal";
    case TokenKind::kCharLiteral:
      return "char-literal";
    case TokenKind::kNumberLiteral:
      return "number-literal";
    case TokenKind::kComment:
      return "comment";
    case TokenKind::kWhitespace:
      return "whitespace";
  }
  return "punctuation";
}

TokenStream::TokenStream(std::string source, std::vector<Token> tokens, ParseStatus status)
    : source_(std::move(source)), tokens_(std::move(tokens)), status_(status) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].countable()) countable_.push_back(i);
  }
}

std::vector<std::string> TokenStream::countable_texts() const {
  std::vector<std::string> out;
  out.reserve(countable_.size());
  for (auto i : countable_) out.push_back(tokens_[i].text);
  return out;
}

bool is_valid_utf8(std::string_view bytes) {
  std::size_t i = 0;
  while (i < bytes.size()) {
    const auto c = static_cast<unsigned char>(bytes[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= bytes.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

TokenStream lex(std::string_view source, const LanguageTables& tables) {
  Scanner scanner(source, tables);
  auto tokens = scanner.run();
  std::vector<std::size_t> countable;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].countable()) countable.push_back(i);
  }
  const bool closed = !countable.empty() && (tokens[countable.back()].text == "}" ||
                                             tokens[countable.back()].text == ";");
  const bool ok = scanner.clean() && closed && balanced(tokens, countable) &&
                  has_method_header(tokens, countable);
  return TokenStream(std::string(source), std::move(tokens),
                     ok ? ParseStatus::kParsable : ParseStatus::kUnparsable);
}

bool unterminated_literal(const Token& token) {
  if (token.kind != TokenKind::kStringLiteral && token.kind != TokenKind::kCharLiteral) return false;
  const std::string& t = token.text;
  if (t.starts_with("\"\"\"")) return t.size() < 6 || !t.ends_with("\"\"\"");
  if (t.size() < 2 || t.back() != t.front()) return true;
  // A closing quote preceded by an odd run of backslashes is escaped.
  std::size_t slashes = 0;
  for (std::size_t i = t.size() - 1; i-- > 1 && t[i] == '\\';) ++slashes;
  return slashes % 2 == 1;
}

std::string detokenize(const TokenStream& stream, std::span<const std::size_t> kept) {
  std::vector<bool> keep(stream.tokens().size(), false);
  for (auto i : kept) {
    if (i < keep.size()) keep[i] = true;
  }
  std::string out;
  bool break_line = false;
  for (auto i : stream.countable()) {
    if (!keep[i]) continue;
    if (!out.empty()) out += break_line ? '\n' : ' ';
    out += stream.tokens()[i].text;
    // An unterminated literal runs to end of line; a space would let it
    // swallow the next token on re-lexing.
    break_line = unterminated_literal(stream.tokens()[i]);
  }
  return out;
}

std::string detokenize(const TokenStream& stream) { return detokenize(stream, stream.countable()); }

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (is_space(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

}  // namespace codezip
