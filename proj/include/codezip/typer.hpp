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
#include <map>
#include <string>
#include <vector>

#include "codezip/language.hpp"
#include "codezip/lexer.hpp"
#include "codezip/priority.hpp"
#include "codezip/token_type.hpp"

namespace codezip {

/// Bit set over the five taxonomy types, indexed by index_of(TypeLabel).
using CandidateSet = std::uint8_t;

inline constexpr CandidateSet candidate_bit(TypeLabel t) {
  return static_cast<CandidateSet>(1u << index_of(t));
}

/// A token stream plus one type label per countable token.
struct TypedStream {
  TokenStream stream;
  /// labels[i] belongs to stream.countable_at(i).
  std::vector<TypeLabel> labels;
  /// Candidate types each countable token matched before tie-breaking.
  std::vector<CandidateSet> candidates;
  /// Occurrences of each countable token text within this example.
  std::map<std::string, std::size_t, std::less<>> tf;

  std::size_t length() const { return labels.size(); }
  std::size_t tf_of(std::size_t countable_index) const;
};

/// Labels every countable token with exactly one taxonomy type.
///
/// Candidates come from a single linear pass with bracket matching:
///   Symbol      punctuation and operator tokens
///   Signature   method declaration headers, from the first modifier/type
///               token through the `)` closing the parameter list
///   Invocation  the name right before a call's `(` plus the dotted receiver
///               chain (names and dots) feeding it
///   Structure   structure keywords, the `( )` head owned by a control
///               keyword, and block braces
///   Identifier  every other identifier
/// A token with several candidates takes the one the table would remove
/// last. Nothing matched means OutOfType.
///
/// When no header can be found (truncated or fragmentary code) the first
/// `name(` group before the first `{` is treated as the header. Code without
/// any `{` has no header.
TypedStream classify(const TokenStream& stream, const PriorityTable& table,
                     const LanguageTables& tables = LanguageTables::java());

/// Lex + classify convenience.
TypedStream classify_source(std::string_view source, const PriorityTable& table,
                            const LanguageTables& tables = LanguageTables::java());

}  // namespace codezip
