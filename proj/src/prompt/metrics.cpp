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

#include "codezip/prompt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "codezip/error.hpp"
#include "codezip/lexer.hpp"

namespace codezip::prompt {

int exact_match(std::string_view pred, std::string_view gold) {
  return normalize_whitespace(pred) == normalize_whitespace(gold) ? 1 : 0;
}

double corpus_em(std::span<const std::string> preds, std::span<const std::string> golds) {
  if (preds.size() != golds.size()) throw InvalidArgument("corpus_em: prediction/gold count mismatch");
  if (preds.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hits += exact_match(preds[i], golds[i]);
  return 100.0 * static_cast<double>(hits) / static_cast<double>(preds.size());
}

namespace {

using Ngram = std::vector<std::string>;

std::map<Ngram, std::size_t> ngram_counts(std::span<const std::string> toks, std::size_t n) {
  std::map<Ngram, std::size_t> out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) ++out[Ngram(toks.begin() + i, toks.begin() + i + n)];
  return out;
}

}  // namespace

double bleu4_proxy(std::span<const std::string> pred, std::span<const std::string> gold) {
  if (pred.empty()) return gold.empty() ? 100.0 : 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cand = ngram_counts(pred, n);
    const auto ref = ngram_counts(gold, n);
    std::size_t matched = 0, total = 0;
    for (const auto& [g, c] : cand) {
      total += c;
      auto it = ref.find(g);
      if (it != ref.end()) matched += std::min(c, it->second);
    }
    log_sum += std::log((static_cast<double>(matched) + 1.0) / (static_cast<double>(total) + 1.0));
  }
  const double c = static_cast<double>(pred.size());
  const double r = static_cast<double>(gold.size());
  const double bp = c >= r ? 1.0 : std::exp(1.0 - r / c);
  return 100.0 * bp * std::exp(log_sum / 4.0);
}

double bleu4_proxy_text(std::string_view pred, std::string_view gold) {
  const auto p = lex(pred).countable_texts();
  const auto g = lex(gold).countable_texts();
  return bleu4_proxy(p, g);
}

}  // namespace codezip::prompt
