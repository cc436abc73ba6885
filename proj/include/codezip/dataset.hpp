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
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codezip/priority.hpp"
#include "codezip/prompt/bm25.hpp"
#include "codezip/task.hpp"

namespace codezip {

/// The nine training ratios, 0.1 through 0.9.
inline constexpr std::array<double, 9> kRatioGrid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

/// Index of tau in kRatioGrid, or nullopt when tau is not a grid value.
std::optional<std::size_t> ratio_index(double tau);

/// One oracle training pair: countable source tokens and the tokens the
/// oracle kept at ratio tau.
struct CompressionSample {
  std::string id;
  Task task = Task::kAssertion;
  double tau = 0.1;
  std::vector<std::string> src;
  std::vector<std::string> tgt;

  bool operator==(const CompressionSample&) const = default;
};

/// True when `sub` is an in-order subsequence of `seq`.
bool is_subsequence(const std::vector<std::string>& sub, const std::vector<std::string>& seq);

/// A compressible code snippet. `group` ties together snippets that must
/// land in the same split (the parts of one knowledge-base row).
struct CodeExample {
  std::string id;
  std::string group;
  std::string code;
};

/// Every compressible part of every row, in row order, with ids "<row>#<part>".
std::vector<CodeExample> code_examples(const std::vector<prompt::KbEntry>& rows, Task task);

/// Group-stable sample id: FNV-1a of "<TASK>|<example id>" in hex, then
/// "-<tenths of tau>". All nine samples of an example share the prefix.
std::string sample_id(Task task, std::string_view example_id, double tau);
/// Prefix of a sample id before the ratio suffix.
std::string_view sample_group(std::string_view id);

struct SplitCounts {
  std::size_t examples = 0;
  std::size_t samples = 0;
};

struct DatasetManifest {
  Task task = Task::kAssertion;
  std::uint64_t seed = 0;
  std::size_t input_examples = 0;
  std::size_t skipped_unparsable = 0;
  SplitCounts train, val, test;

  /// key=value lines.
  std::string serialize() const;
  static DatasetManifest parse(std::string_view text);
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<CompressionSample> train, val, test;
};

/// Runs the oracle at all nine ratios for each parsable example and splits
/// 80/10/10 by group after a seeded shuffle. Unparsable examples are skipped
/// and counted. Throws InvalidArgument when no example is left.
Dataset build_samples(const std::vector<CodeExample>& examples, Task task, const PriorityTable& table,
                      std::uint64_t seed);

/// build_samples, then writes train.jsonl, val.jsonl, test.jsonl and
/// manifest.txt into out_dir (created if missing).
DatasetManifest build_dataset(const std::vector<CodeExample>& examples, Task task, const PriorityTable& table,
                              std::uint64_t seed, const std::string& out_dir);

/// JSONL row {id, task, tau, src, tgt}.
std::string sample_json(const CompressionSample& sample);
/// Validates schema, ratio grid, extractivity and removal count. Throws
/// FormatError naming the line and field.
CompressionSample parse_sample(std::string_view line, std::size_t line_no);

/// Streaming reader over one JSONL split file.
class DatasetReader {
 public:
  explicit DatasetReader(const std::string& path);
  /// Next row, or nullopt at end of file.
  std::optional<CompressionSample> next();
  std::size_t line() const { return line_no_; }

 private:
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

std::vector<CompressionSample> load_dataset(const std::string& path);

void write_samples(const std::string& path, const std::vector<CompressionSample>& samples);

}  // namespace codezip
