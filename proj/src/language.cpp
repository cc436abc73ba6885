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

#include "codezip/language.hpp"

#include <fstream>
#include <sstream>

#include "codezip/error.hpp"

namespace codezip {
namespace {

constexpr std::string_view kJavaKeywords =
    "abstract assert boolean break byte case catch char class const continue "
    "default do double else enum extends final finally float for goto if "
    "implements import instanceof int interface long native new package private "
    "protected public return short static strictfp super switch synchronized "
    "this throw throws transient try void volatile while var record yield "
    "true false null";

constexpr std::string_view kJavaStructure =
    "if else for while do switch case return try catch finally class interface "
    "enum break continue new throw";

constexpr std::string_view kJavaControl = "if for while switch catch synchronized";

void add_words(std::set<std::string, std::less<>>& into, std::string_view words) {
  std::istringstream in{std::string(words)};
  std::string w;
  while (in >> w) into.insert(w);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string join(const std::set<std::string, std::less<>>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

const LanguageTables& LanguageTables::java() {
  static const LanguageTables tables = [] {
    LanguageTables t;
    add_words(t.keywords, kJavaKeywords);
    add_words(t.structure, kJavaStructure);
    add_words(t.control, kJavaControl);
    return t;
  }();
  return tables;
}

LanguageTables LanguageTables::parse(std::string_view text) {
  LanguageTables t;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("language table line " + std::to_string(line_no) + ": missing '='");
    }
    auto key = trim(line.substr(0, eq));
    auto value = line.substr(eq + 1);
    if (key == "keywords") {
      add_words(t.keywords, value);
    } else if (key == "structure") {
      add_words(t.structure, value);
    } else if (key == "control") {
      add_words(t.control, value);
    } else {
      throw FormatError("language table line " + std::to_string(line_no) + ": unknown key '" +
                        std::string(key) + "'");
    }
  }
  return t;
}

LanguageTables LanguageTables::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read language table '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string LanguageTables::serialize() const {
  return "keywords = " + join(keywords) + "\nstructure = " + join(structure) +
         "\ncontrol = " + join(control) + "\n";
}

}  // namespace codezip
