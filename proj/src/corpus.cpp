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

#include "codezip/corpus.hpp"

#include <array>
#include <cstdio>
#include <random>
#include <string>

namespace codezip {
namespace {

constexpr std::array kNouns = {"count", "value", "total", "index", "name",   "items", "result", "buffer",
                               "size",  "key",   "node",  "amount", "offset", "limit", "score",  "data",
                               "state", "price", "level", "user",   "width",  "depth", "weight", "label"};
constexpr std::array kClasses = {"Counter", "Account", "Parser", "Node",    "Item",  "Order",
                                 "Cache",   "Buffer",  "Matrix", "Session", "Graph", "Queue"};
constexpr std::array kVerbs = {"get", "compute", "update", "find", "load",  "check",
                               "add", "remove",  "reset",  "build", "parse", "apply"};
constexpr std::array kHelpers = {"size", "isEmpty", "length", "hashCode", "toString", "next", "peek", "clear"};
constexpr std::array kSyllables = {"zor", "vex", "blim", "trak", "qua", "nop", "dax", "fiz", "glo", "mur"};

struct Type {
  const char* name;
  bool numeric;
};
constexpr std::array kTypes = {Type{"int", true}, Type{"long", true}, Type{"double", true},
                               Type{"boolean", false}, Type{"String", false}};

class Gen {
 public:
  Gen(std::uint64_t seed, double oov) : rng_(seed), oov_(oov) {}

  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }

  template <typename A>
  std::string from(const A& pool) {
    return pool[pick(pool.size())];
  }

  std::string rare() {
    std::string s = from(kSyllables);
    std::string t = from(kSyllables);
    t[0] = static_cast<char>(t[0] - 'a' + 'A');
    return s + t + std::to_string(pick(90) + 10);
  }

  std::string noun() { return chance(oov_) ? rare() : from(kNouns); }
  static std::string cap(std::string s) {
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
  }
  std::string klass() { return chance(oov_) ? cap(rare()) : from(kClasses); }
  std::string method_name() { return from(kVerbs) + cap(noun()); }
  std::string literal(const Type& t) {
    if (std::string(t.name) == "boolean") return chance(0.5) ? "true" : "false";
    if (std::string(t.name) == "String") return "\"" + from(kNouns) + "\"";
    if (std::string(t.name) == "double") return std::to_string(pick(9) + 1) + ".5";
    return std::to_string(pick(20));
  }

 private:
  std::mt19937_64 rng_;
  double oov_;
};

struct Method {
  std::string header;
  std::string body;
  std::string name;
  Type ret;
  std::vector<std::pair<Type, std::string>> params;

  std::string text() const { return header + " {\n" + body + "}\n"; }
};

std::string statement(Gen& g, const std::string& local, const Type& lt, const std::string& field) {
  switch (g.pick(6)) {
    case 0:
      return "    " + field + "." + g.method_name() + "(" + local + ");\n";
    case 1:
      if (lt.numeric) return "    if (" + local + " > " + g.literal(lt) + ") {\n      " + local + " = " + local + " - 1;\n    }\n";
      return "    if (" + local + " == null) {\n      throw new IllegalArgumentException(\"" + g.from(kNouns) + "\");\n    }\n";
    case 2:
      return "    for (int i = 0; i < " + field + "." + g.from(kHelpers) + "(); i++) {\n      " + field + "." +
             g.method_name() + "(i);\n    }\n";
    case 3:
      return "    this." + g.noun() + " = " + local + ";\n";
    case 4:
      if (lt.numeric) return "    " + local + " += " + field + "." + g.method_name() + "();\n";
      return "    " + field + "." + g.from(kHelpers) + "();\n";
    default:
      return "    " + field + "." + g.method_name() + "(" + local + ", " + g.literal(lt) + ");\n";
  }
}

Method method(Gen& g) {
  Method m;
  m.ret = kTypes[g.pick(kTypes.size())];
  m.name = g.method_name();
  const std::size_t n_params = g.pick(3);
  std::string params;
  for (std::size_t i = 0; i < n_params; ++i) {
    Type t = kTypes[g.pick(kTypes.size())];
    std::string name = g.noun();
    if (i > 0) params += ", ";
    params += std::string(t.name) + " " + name + std::to_string(i);
    m.params.push_back({t, name + std::to_string(i)});
  }
  m.header = std::string(g.chance(0.8) ? "public " : "private ") + m.ret.name + " " + m.name + "(" + params + ")";
  const std::string field = g.noun() + "s";
  const std::string local = g.noun();
  m.body = "    " + std::string(m.ret.name) + " " + local + " = " + field + "." + g.method_name() + "(" +
           (m.params.empty() ? "" : m.params[0].second) + ");\n";
  const std::size_t n_stmts = 1 + g.pick(2);
  for (std::size_t i = 0; i < n_stmts; ++i) m.body += statement(g, local, m.ret, field);
  m.body += "    return " + local + ";\n";
  return m;
}

std::string call_args(Gen& g, const Method& m) {
  std::string args;
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    if (i > 0) args += ", ";
    args += g.literal(m.params[i].first);
  }
  return args;
}

prompt::KbEntry assertion_row(Gen& g, std::size_t i) {
  const Method focal = method(g);
  const std::string cls = g.klass();
  const std::string obj = g.noun() + "Under";
  std::string test = "@Test\npublic void test" + Gen::cap(focal.name) + "() {\n";
  test += "    " + cls + " " + obj + " = new " + cls + "(" + g.literal(kTypes[0]) + ");\n";
  if (g.chance(0.5)) test += "    " + obj + "." + g.method_name() + "(" + g.literal(kTypes[g.pick(5)]) + ");\n";
  test += "    " + std::string(focal.ret.name) + " result = " + obj + "." + focal.name + "(" + call_args(g, focal) + ");\n";
  test += "    \"<AssertPlaceHolder>\";\n}\n";
  std::string answer;
  if (std::string(focal.ret.name) == "boolean") {
    answer = g.chance(0.5) ? "assertTrue(result);" : "assertFalse(result);";
  } else if (std::string(focal.ret.name) == "String" && g.chance(0.3)) {
    answer = "assertNotNull(result);";
  } else {
    answer = "assertEquals(" + g.literal(focal.ret) + ", result);";
  }
  prompt::KbEntry e;
  e.id = "assertion-" + std::to_string(i);
  e.query = focal.name + " " + cls;
  e.code = {focal.text(), test};
  e.answer = answer;
  return e;
}

std::string inject_bug(Gen& g, std::string body) {
  const std::array<std::pair<const char*, const char*>, 4> swaps = {
      {{" < ", " <= "}, {" > ", " >= "}, {" - 1", " + 1"}, {" == null", " != null"}}};
  for (std::size_t k = 0, start = g.pick(swaps.size()); k < swaps.size(); ++k) {
    const auto& [from, to] = swaps[(start + k) % swaps.size()];
    auto pos = body.find(from);
    if (pos != std::string::npos) return body.replace(pos, std::string(from).size(), to);
  }
  auto pos = body.find("    return ");
  return body.insert(pos, "    this.state = null;\n");
}

prompt::KbEntry bugs2fix_row(Gen& g, std::size_t i) {
  const Method m = method(g);
  prompt::KbEntry e;
  e.id = "bugs2fix-" + std::to_string(i);
  e.query = m.name;
  e.code = {m.header + " {\n" + inject_bug(g, m.body) + "}\n"};
  e.answer = m.text();
  return e;
}

prompt::KbEntry suggestion_row(Gen& g, std::size_t i) {
  const Method m = method(g);
  prompt::KbEntry e;
  e.id = "suggestion-" + std::to_string(i);
  e.query = m.name;
  e.code = {m.header};
  e.answer = m.text();
  return e;
}

}  // namespace

std::vector<prompt::KbEntry> synthetic_corpus(Task task, const CorpusOptions& options) {
  Gen g(options.seed, options.oov_rate);
  std::vector<prompt::KbEntry> rows;
  rows.reserve(options.size);
  for (std::size_t i = 0; i < options.size; ++i) {
    switch (task) {
      case Task::kAssertion:
        rows.push_back(assertion_row(g, i));
        break;
      case Task::kBugs2Fix:
        rows.push_back(bugs2fix_row(g, i));
        break;
      case Task::kSuggestion:
        rows.push_back(suggestion_row(g, i));
        break;
    }
  }
  return rows;
}

}  // namespace codezip
