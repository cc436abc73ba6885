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
#include <vector>

#include "codezip/priority.hpp"
#include "codezip/prompt/bm25.hpp"
#include "codezip/prompt/lm_client.hpp"
#include "codezip/prompt/rag.hpp"

namespace codezip {

struct AblationOptions {
  long shots = 1;
  std::string model = "stub";
  unsigned concurrency = 4;
  /// When set, records are appended here as JSONL as soon as they exist.
  std::string persist_path;
};

/// Deletes every token labeled `type` (typed with the task's default table).
prompt::ShotRewrite strip_type(const std::string& code, TypeLabel type, const PriorityTable& labeling);

/// Leave-one-out RAG over the corpus: one run with intact shots, then one
/// run per taxonomy type with that type stripped from every shot. Metrics
/// are corpus-level; tau_code_t is the mean removed fraction of the
/// stripped shot parts. Throws InvalidArgument on an empty corpus or
/// shots < 1, and TransportError listing the failed queries (after
/// persisting completed records) when any LM call fails.
std::vector<AblationRecord> run_ablation(const std::vector<prompt::KbEntry>& corpus, Task task,
                                         prompt::BaseLMClient& lm, const AblationOptions& options = {});

std::string ablation_record_json(const AblationRecord& record);
AblationRecord parse_ablation_record(std::string_view line, std::size_t line_no);
std::vector<AblationRecord> load_ablation_records(const std::string& path);

}  // namespace codezip
