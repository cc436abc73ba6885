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

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "codezip/task.hpp"

namespace codezip::prompt {

struct Section {
  std::string header;
  /// Whether shots may compress this part.
  bool compressible = false;
};

/// Section layout of a task. The last section is the answer slot.
struct TaskTemplate {
  Task task = Task::kAssertion;
  std::string instruction;
  std::vector<Section> sections;

  std::size_t input_count() const { return sections.size() - 1; }
  const Section& answer_section() const { return sections.back(); }

  static TaskTemplate for_task(Task task);
};

/// A demonstration: one text per input section plus the answer.
struct Shot {
  std::vector<std::string> inputs;
  std::string answer;
};

struct PromptBundle {
  std::vector<std::string> question;
  /// Rendered demonstration blocks, in retrieval order.
  std::vector<std::string> shots;
  std::string rendered;
  /// Countable lexer tokens of `rendered`.
  std::size_t token_count = 0;
};

/// Renders the instruction, one block per shot, then the question block
/// with an empty answer section. Missing input parts render as empty
/// sections; extra parts are appended to the last input section.
PromptBundle assemble(const TaskTemplate& tmpl, const std::vector<Shot>& shots,
                      const std::vector<std::string>& question);
PromptBundle assemble(Task task, const std::vector<Shot>& shots, const std::vector<std::string>& question);

/// Splits rendered text on `### NAME` lines into (header, body) pairs.
std::vector<std::pair<std::string, std::string>> parse_sections(std::string_view rendered);

}  // namespace codezip::prompt
