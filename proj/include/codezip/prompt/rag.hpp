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

#include <functional>
#include <string>
#include <vector>

#include "codezip/prompt/bm25.hpp"
#include "codezip/prompt/lm_client.hpp"
#include "codezip/prompt/template.hpp"

namespace codezip::prompt {

/// A rewritten code part of a demonstration.
struct ShotRewrite {
  std::string text;
  std::size_t original_tokens = 0;
  std::size_t removed_tokens = 0;
};

/// Applied to every compressible part of every retrieved shot.
using ShotTransform = std::function<ShotRewrite(const std::string& code)>;

/// Leaves the code unchanged.
ShotRewrite keep_all(const std::string& code);

struct EvalOptions {
  long shots = 1;
  std::string model = "stub";
  /// Upper bound on LM calls in flight.
  unsigned concurrency = 4;
  /// Drop the question's own row from its retrieved shots.
  bool exclude_self = true;
};

struct QueryFailure {
  std::size_t index = 0;
  std::string id;
  std::string message;
};

struct EvalReport {
  /// Task metric in percent: exact match for Assertion and Bugs2Fix,
  /// BLEU-4 proxy for Suggestion. Failed queries score as misses.
  double metric = 0.0;
  double mean_token_count = 0.0;
  /// Mean removed fraction over the rewritten shot parts.
  double mean_removed_fraction = 0.0;
  std::vector<std::string> predictions;
  std::vector<std::size_t> token_counts;
  std::vector<QueryFailure> failures;
};

/// Mean per-query score in percent for the task's metric.
double task_metric(Task task, const std::vector<std::string>& preds, const std::vector<std::string>& golds);

/// Builds the prompt of one question: top-N retrieved shots, rewritten by
/// `transform`, then the question's inputs.
PromptBundle build_prompt(const KnowledgeBase& kb, const KbEntry& question, Task task,
                          const ShotTransform& transform, const EvalOptions& options,
                          std::vector<ShotRewrite>* rewrites = nullptr);

/// Retrieval-augmented evaluation of every question against `lm` at
/// temperature 0. Results are keyed by question index regardless of
/// completion order.
EvalReport evaluate(const KnowledgeBase& kb, const std::vector<KbEntry>& questions, Task task, BaseLMClient& lm,
                    const ShotTransform& transform, const EvalOptions& options);

}  // namespace codezip::prompt
