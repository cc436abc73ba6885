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

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "codezip/dataset.hpp"
#include "codezip/task.hpp"

namespace codezip::neuralzip {

inline constexpr int kPad = 0;
inline constexpr int kUnk = 1;
inline constexpr int kBos = 2;
inline constexpr int kEos = 3;
inline constexpr int kTaskAssertion = 4;
inline constexpr int kTaskBugs2Fix = 5;
inline constexpr int kTaskSuggestion = 6;
inline constexpr int kRatioOpen = 7;
inline constexpr int kRatioClose = 8;
inline constexpr int kCompressOpen = 9;
inline constexpr int kCompressClose = 10;
/// "0".."9" occupy 11..20 and "." is 21. They double as ordinary tokens.
inline constexpr int kDigitZero = 11;
inline constexpr int kPoint = 21;
inline constexpr int kNumReserved = 22;

int task_token(Task task);

/// Dense token table. Ids 0..21 are the reserved tokens above; the rest
/// come from training data by descending count, ties by text.
class Vocab {
 public:
  Vocab();

  /// Counts source and target tokens of `train`; keeps those seen at
  /// least `min_count` times.
  static Vocab build(const std::vector<CompressionSample>& train, std::size_t min_count = 2);
  /// Restores a saved table. Throws FormatError when the reserved prefix
  /// is wrong or a token repeats.
  static Vocab from_tokens(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::optional<int> find(std::string_view token) const;
  /// Id of the token, or kUnk.
  int id(std::string_view token) const;
  bool is_special(int id) const { return id >= 0 && id < kDigitZero; }

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  void add(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

/// One model input with its copy bookkeeping.
struct EncodedSample {
  /// [<TASK>, <Ratio>, "0", ".", digit, </Ratio>, <Compress>, src..., </Compress>]
  std::vector<int> input;
  /// Extended id of each input position: vocab id or V + slot for a
  /// source token outside the vocab; -1 marks non-content positions,
  /// which are never copied.
  std::vector<int> input_ext;
  /// Text of extended slot V + k.
  std::vector<std::string> oov;
  /// Target extended ids ending with <EOS>.
  std::vector<int> target;
  std::size_t vocab_size = 0;
  bool truncated = false;

  std::size_t extended_size() const { return vocab_size + oov.size(); }
  /// Decoder input: <BOS> then the target shifted right, slots mapped to <UNK>.
  std::vector<int> decoder_input() const;
};

struct EncodeOptions {
  /// Maximum input length including the seven prefix tokens and the closing tag.
  std::size_t max_src = 160;
  /// Maximum target length including <EOS>.
  std::size_t max_tgt = 160;
  /// Map out-of-vocab targets to their copy slot; when false they become <UNK>.
  bool copy_targets = true;
};

/// Plain input ids (out-of-vocab source tokens as <UNK>). Throws
/// InvalidArgument when tau is off the 0.1..0.9 grid.
std::vector<int> encode_input(const Vocab& vocab, Task task, double tau, const std::vector<std::string>& src);

/// Full encoding; `tgt` may be null for decoding. Logs a warning to stderr
/// when truncating.
EncodedSample encode(const Vocab& vocab, Task task, double tau, const std::vector<std::string>& src,
                     const std::vector<std::string>* tgt, const EncodeOptions& options = {});
EncodedSample encode(const Vocab& vocab, const CompressionSample& sample, const EncodeOptions& options = {});

/// Text of an extended id in the context of `sample`.
std::string ext_token(const Vocab& vocab, const EncodedSample& sample, int ext_id);

}  // namespace codezip::neuralzip
