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
#include <vector>

#include "codezip/prompt/bm25.hpp"
#include "codezip/task.hpp"

namespace codezip {

struct CorpusOptions {
  std::size_t size = 200;
  std::uint64_t seed = 0;
  /// Chance that a generated name is a rare made-up identifier.
  double oov_rate = 0.12;
};

/// Seeded generator of small Java knowledge-base rows shaped like the task
/// templates: Assertion rows hold a focal method, a unit test with
/// "<AssertPlaceHolder>" and the assertion; Bugs2Fix rows hold a buggy
/// method and its fix; Suggestion rows hold a header and the whole method.
/// Every code part lexes as parsable.
std::vector<prompt::KbEntry> synthetic_corpus(Task task, const CorpusOptions& options = {});

}  // namespace codezip
