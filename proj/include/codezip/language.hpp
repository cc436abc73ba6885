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

#include <set>
#include <string>
#include <string_view>

namespace codezip {

/// Keyword tables that drive both lexing (keyword vs identifier) and type
/// classification. Only Java ships; other languages load a table file with
/// the same keys.
///
/// File format, one `key = word word ...` per line, `#` starts a comment:
///
///   keywords   = abstract assert boolean ...
///   structure  = if else for while ...
///   control    = if for while switch catch synchronized
///
/// `structure` words are Structure candidates. `control` words own the
/// parenthesised head that follows them (`if (...)`), which is labelled as
/// part of the statement structure. Unknown keys are rejected.
struct LanguageTables {
  std::set<std::string, std::less<>> keywords;
  std::set<std::string, std::less<>> structure;
  std::set<std::string, std::less<>> control;

  bool is_keyword(std::string_view word) const { return keywords.contains(word); }
  bool is_structure(std::string_view word) const { return structure.contains(word); }
  bool is_control(std::string_view word) const { return control.contains(word); }

  /// Built-in Java tables.
  static const LanguageTables& java();

  /// Parses the text form described above. Throws FormatError.
  static LanguageTables parse(std::string_view text);
  static LanguageTables load(const std::string& path);

  std::string serialize() const;
};

}  // namespace codezip
