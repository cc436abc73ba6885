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

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace codezip::prompt {

/// 1 when the strings match after collapsing whitespace runs and trimming.
int exact_match(std::string_view pred, std::string_view gold);

/// Mean exact match in percent. Throws InvalidArgument on size mismatch.
double corpus_em(std::span<const std::string> preds, std::span<const std::string> golds);

/// Sentence BLEU-4 in percent with add-one smoothing on every n-gram
/// precision and the usual brevity penalty. Stands in for CodeBLEU, which
/// also needs syntax and dataflow matching; the two are not equivalent.
double bleu4_proxy(std::span<const std::string> pred, std::span<const std::string> gold);

/// bleu4_proxy over countable lexer tokens of both strings.
double bleu4_proxy_text(std::string_view pred, std::string_view gold);

}  // namespace codezip::prompt
