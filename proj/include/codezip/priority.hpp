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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "codezip/task.hpp"
#include "codezip/token_type.hpp"

namespace codezip {

/// One type-ablation measurement: what fraction of code tokens deleting every
/// token of `type_removed` achieved, and the task metric with and without the
/// deletion (percent scale).
struct AblationRecord {
  Task task = Task::kAssertion;
  TypeLabel type_removed = TypeLabel::kSymbol;
  double tau_code_t = 0.0;
  double metric_full = 0.0;
  double metric_ablated = 0.0;
};

/// Floor on the relative degradation so that a type whose removal costs
/// nothing still gets a finite (very large) priority.
inline constexpr double kDegradationFloor = 1e-6;

/// Relative degradation d_T = max(eps, (full - ablated) / full).
double relative_degradation(const AblationRecord& record);

/// Priority(T) = tau_code_T / d_T. Throws InvalidArgument when metric_full <= 0
/// or tau_code_t lies outside [0, 1].
double compute_priority(const AblationRecord& record);

/// Per-task removal priorities. Rank 1 is removed first; OutOfType is always
/// ranked after the five taxonomy types.
class PriorityTable {
 public:
  static constexpr int kOutOfTypeRank = static_cast<int>(kNumRankedTypes) + 1;

  PriorityTable() : PriorityTable(Task::kAssertion, {1.0, 1.0, 1.0, 1.0, 1.0}) {}

  /// Ranks by descending priority; equal priorities follow the TypeLabel
  /// enumerator order. Throws InvalidArgument on negative or non-finite values.
  PriorityTable(Task task, std::array<double, kNumRankedTypes> priorities);

  Task task() const { return task_; }
  double priority(TypeLabel t) const;
  /// 1..5 for taxonomy types, kOutOfTypeRank for OutOfType.
  int rank(TypeLabel t) const;
  const std::array<double, kNumRankedTypes>& priorities() const { return priorities_; }
  /// Types in removal order (rank 1 first).
  std::array<TypeLabel, kNumRankedTypes> removal_order() const;

  /// Shipped defaults. The orderings follow the published per-task
  /// hierarchies; the numeric spacing is synthetic.
  static PriorityTable default_for(Task task);

  /// Plain-text key-value form:
  ///   version=1
  ///   task=<TAG>
  ///   type.<Name>.priority=<float>
  /// '#' lines are comments. Unknown keys, duplicate or missing types are
  /// rejected with FormatError.
  std::string serialize() const;
  static PriorityTable parse(std::string_view text);
  static PriorityTable load(const std::string& path);
  void save(const std::string& path) const;

  bool operator==(const PriorityTable&) const = default;

 private:
  Task task_;
  std::array<double, kNumRankedTypes> priorities_;
  std::array<int, kNumRankedTypes> ranks_{};
};

/// Builds a table from exactly one record per taxonomy type, all for the same
/// task. Missing or duplicated types raise InvalidArgument naming the type.
PriorityTable build_table(std::span<const AblationRecord> records);

}  // namespace codezip
