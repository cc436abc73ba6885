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

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "codezip/error.hpp"
#include "codezip/priority.hpp"
#include "codezip/typer.hpp"

namespace codezip {

struct CompressionRequest {
  TypedStream typed;
  double tau_code = 0.0;
  PriorityTable table;
};

/// Indices are countable-token indices (0..L-1) into the request's stream.
struct CompressionResult {
  std::vector<std::size_t> kept_indices;
  std::vector<std::size_t> removed_indices;
  /// Removed tokens in the order they left the queue.
  std::vector<std::size_t> removal_order;
  double achieved_tau = 0.0;
  std::string text;

  std::vector<std::string> kept_tokens(const TokenStream& stream) const;
};

/// Number of tokens to drop: floor(tau * L). A 1e-9 slack absorbs binary
/// rounding of decimal ratios (0.29 * 100 must give 29, not 28).
std::size_t removal_count(double tau_code, std::size_t length);

/// Queue key of one token; smaller pops first. Rank ascending, then term
/// frequency descending, then later position first.
struct RemovalKey {
  int rank = 0;
  std::size_t tf = 0;
  std::size_t position = 0;

  bool pops_before(const RemovalKey& other) const {
    if (rank != other.rank) return rank < other.rank;
    if (tf != other.tf) return tf > other.tf;
    return position > other.position;
  }
};

RemovalKey removal_key(const TypedStream& typed, const PriorityTable& table, std::size_t index);

/// Priority-driven greedy removal: build one queue over all countable tokens,
/// pop floor(tau * L) of them, keep the rest in source order. Throws
/// InvalidArgument for tau outside [0, 1] or an empty stream with tau > 0.
CompressionResult compress(const CompressionRequest& req);

/// Element-wise compress with order preserved. Items are processed on up to
/// `threads` workers (0 = hardware concurrency); output does not depend on
/// the thread count. Failures are collected and rethrown together.
std::vector<CompressionResult> compress_batch(const std::vector<CompressionRequest>& reqs,
                                              unsigned threads = 0);

/// Raised by compress_batch; carries every failing index.
class BatchError : public Error {
 public:
  explicit BatchError(std::vector<std::pair<std::size_t, std::string>> failures);
  const std::vector<std::pair<std::size_t, std::string>>& failures() const { return failures_; }

 private:
  std::vector<std::pair<std::size_t, std::string>> failures_;
};

struct OracleOptions {
  /// Refuse code the structural parser rejects (UnparsableInput).
  bool strict_parse = false;
};

/// Lex, classify and compress raw source with the oracle.
CompressionResult compress_source(std::string_view source, double tau_code, const PriorityTable& table,
                                  const OracleOptions& options = {});

}  // namespace codezip
