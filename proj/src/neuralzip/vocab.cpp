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

#include "codezip/neuralzip/vocab.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

#include "codezip/error.hpp"

namespace codezip::neuralzip {
namespace {

const std::vector<std::string>& reserved() {
  static const std::vector<std::string> r = {"<PAD>", "<UNK>",  "<BOS>",     "<EOS>",      "<ASSERTION>", "<BUGS2FIX>",
                                             "<SUGGESTION>", "<Ratio>", "</Ratio>", "<Compress>", "</Compress>", "0",
                                             "1",     "2",      "3",         "4",          "5",           "6",
                                             "7",     "8",      "9",         "."};
  return r;
}

}  // namespace

int task_token(Task task) {
  switch (task) {
    case Task::kAssertion:
      return kTaskAssertion;
    case Task::kBugs2Fix:
      return kTaskBugs2Fix;
    case Task::kSuggestion:
      return kTaskSuggestion;
  }
  return kTaskAssertion;
}

Vocab::Vocab() {
  for (const auto& t : reserved()) add(t);
}

void Vocab::add(std::string token) {
  index_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(std::move(token));
}

Vocab Vocab::build(const std::vector<CompressionSample>& train, std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : train) {
    for (const auto& t : s.src) ++counts[t];
    for (const auto& t : s.tgt) ++counts[t];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocab v;
  for (auto& [token, n] : ranked) {
    if (n >= min_count && !v.find(token)) v.add(token);
  }
  return v;
}

Vocab Vocab::from_tokens(std::vector<std::string> tokens) {
  const auto& r = reserved();
  if (tokens.size() < r.size() || !std::equal(r.begin(), r.end(), tokens.begin())) {
    throw FormatError("vocabulary does not start with the reserved tokens");
  }
  Vocab v;
  for (std::size_t i = r.size(); i < tokens.size(); ++i) {
    if (v.find(tokens[i])) throw FormatError("vocabulary repeats token '" + tokens[i] + "'");
    v.add(std::move(tokens[i]));
  }
  return v;
}

std::optional<int> Vocab::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Vocab::id(std::string_view token) const { return find(token).value_or(kUnk); }

std::vector<int> EncodedSample::decoder_input() const {
  std::vector<int> in{kBos};
  for (std::size_t i = 0; i + 1 < target.size(); ++i) {
    in.push_back(target[i] < static_cast<int>(vocab_size) ? target[i] : kUnk);
  }
  return in;
}

namespace {

int ratio_digit(double tau) {
  if (!ratio_index(tau)) throw InvalidArgument("ratio must be one of 0.1..0.9, got " + std::to_string(tau));
  return static_cast<int>(std::lround(tau * 10));
}

}  // namespace

std::vector<int> encode_input(const Vocab& vocab, Task task, double tau, const std::vector<std::string>& src) {
  std::vector<int> ids = {task_token(task), kRatioOpen, kDigitZero, kPoint, kDigitZero + ratio_digit(tau),
                          kRatioClose, kCompressOpen};
  for (const auto& t : src) ids.push_back(vocab.id(t));
  ids.push_back(kCompressClose);
  return ids;
}

EncodedSample encode(const Vocab& vocab, Task task, double tau, const std::vector<std::string>& src,
                     const std::vector<std::string>* tgt, const EncodeOptions& options) {
  constexpr std::size_t kFrame = 8;
  if (options.max_src <= kFrame || options.max_tgt < 1) throw InvalidArgument("encode: length limits too small");
  EncodedSample e;
  e.vocab_size = vocab.size();
  const std::size_t keep = std::min(src.size(), options.max_src - kFrame);
  if (keep < src.size()) {
    e.truncated = true;
    std::cerr << "warning: source of " << src.size() << " tokens truncated to " << keep << "\n";
  }
  const std::vector<std::string> body(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(keep));
  e.input = encode_input(vocab, task, tau, body);
  e.input_ext.assign(e.input.size(), -1);
  std::unordered_map<std::string, int> slots;
  auto ext_of = [&](const std::string& t) -> std::optional<int> {
    if (auto id = vocab.find(t)) return *id;
    auto it = slots.find(t);
    if (it == slots.end()) return std::nullopt;
    return it->second;
  };
  for (std::size_t i = 0; i < body.size(); ++i) {
    const auto& t = body[i];
    auto ext = ext_of(t);
    if (!ext) {
      ext = static_cast<int>(vocab.size() + e.oov.size());
      slots.emplace(t, *ext);
      e.oov.push_back(t);
    }
    e.input_ext[7 + i] = *ext;
  }
  if (tgt) {
    const std::size_t n = std::min(tgt->size(), options.max_tgt - 1);
    if (n < tgt->size()) {
      e.truncated = true;
      std::cerr << "warning: target of " << tgt->size() << " tokens truncated to " << n << "\n";
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto ext = ext_of((*tgt)[i]);
      int id = ext.value_or(kUnk);
      if (!options.copy_targets && id >= static_cast<int>(vocab.size())) id = kUnk;
      e.target.push_back(id);
    }
    e.target.push_back(kEos);
  }
  return e;
}

EncodedSample encode(const Vocab& vocab, const CompressionSample& sample, const EncodeOptions& options) {
  return encode(vocab, sample.task, sample.tau, sample.src, &sample.tgt, options);
}

std::string ext_token(const Vocab& vocab, const EncodedSample& sample, int ext_id) {
  if (ext_id < static_cast<int>(vocab.size())) return vocab.token(ext_id);
  return sample.oov.at(static_cast<std::size_t>(ext_id) - vocab.size());
}

}  // namespace codezip::neuralzip
