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

#include "codezip/task.hpp"

#include <algorithm>
#include <cctype>

#include "codezip/error.hpp"

namespace codezip {

std::string_view task_tag(Task task) {
  switch (task) {
    case Task::kAssertion:
      return "ASSERTION";
    case Task::kBugs2Fix:
      return "BUGS2FIX";
    case Task::kSuggestion:
      return "SUGGESTION";
  }
  return "ASSERTION";
}

std::optional<Task> parse_task(std::string_view tag) {
  std::string upper(tag);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (Task t : kAllTasks) {
    if (task_tag(t) == upper) return t;
  }
  return std::nullopt;
}

Task require_task(std::string_view tag) {
  if (auto t = parse_task(tag)) return *t;
  throw InvalidArgument("unknown task tag '" + std::string(tag) +
                        "' (expected ASSERTION, BUGS2FIX or SUGGESTION)");
}

}  // namespace codezip
