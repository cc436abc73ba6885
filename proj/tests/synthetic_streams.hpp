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

// Random typed streams with hand-assigned labels, for compressor tests that
// should not depend on the classifier.

#include <random>
#include <string>
#include <vector>

#include "codezip/typer.hpp"

namespace codezip::testing {

inline TypedStream make_typed(const std::vector<std::string>& texts, const std::vector<TypeLabel>& labels) {
  std::string src;
  for (const auto& t : texts) src += t + " ";
  TypedStream ts;
  ts.stream = lex(src);
  ts.labels = labels;
  ts.candidates.assign(labels.size(), 0);
  for (const auto& t : texts) ++ts.tf[t];
  return ts;
}

/// L identifier tokens drawn from a small pool (so term frequencies repeat),
/// with uniformly random labels including OutOfType.
inline TypedStream random_typed(std::mt19937_64& rng, std::size_t length) {
  static const std::vector<std::string> pool = {"a", "b", "c", "d", "e", "f", "g"};
  std::uniform_int_distribution<std::size_t> word(0, pool.size() - 1);
  std::uniform_int_distribution<int> label(0, 5);
  std::vector<std::string> texts;
  std::vector<TypeLabel> labels;
  for (std::size_t i = 0; i < length; ++i) {
    texts.push_back(pool[word(rng)]);
    labels.push_back(static_cast<TypeLabel>(label(rng)));
  }
  return make_typed(texts, labels);
}

inline PriorityTable random_table(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> p(0, 4);  // integer values force rank ties
  return PriorityTable(Task::kAssertion, {double(p(rng)), double(p(rng)), double(p(rng)), double(p(rng)),
                                          double(p(rng))});
}

}  // namespace codezip::testing
