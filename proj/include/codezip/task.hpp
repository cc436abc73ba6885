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

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace codezip {

/// The three method-level coding tasks the toolkit ships templates and
/// default priority tables for.
enum class Task { kAssertion, kBugs2Fix, kSuggestion };

inline constexpr std::array<Task, 3> kAllTasks = {Task::kAssertion, Task::kBugs2Fix,
                                                  Task::kSuggestion};

/// Canonical upper-case tag ("ASSERTION", "BUGS2FIX", "SUGGESTION").
std::string_view task_tag(Task task);

/// Parses a tag, case-insensitively. Returns nullopt for unknown tags.
std::optional<Task> parse_task(std::string_view tag);

/// Like parse_task but throws InvalidArgument naming the bad tag.
Task require_task(std::string_view tag);

}  // namespace codezip
