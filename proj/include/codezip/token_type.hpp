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
#include <cstddef>
#include <optional>
#include <string_view>

namespace codezip {

/// Five-way code token taxonomy plus the catch-all for tokens that match no
/// rule. The enumerator order is the fixed tie-break order used when two
/// types have equal priority.
enum class TypeLabel { kSymbol, kSignature, kInvocation, kIdentifier, kStructure, kOutOfType };

inline constexpr std::size_t kNumRankedTypes = 5;

inline constexpr std::array<TypeLabel, kNumRankedTypes> kRankedTypes = {
    TypeLabel::kSymbol, TypeLabel::kSignature, TypeLabel::kInvocation, TypeLabel::kIdentifier,
    TypeLabel::kStructure};

inline constexpr std::size_t index_of(TypeLabel t) { return static_cast<std::size_t>(t); }

std::string_view type_label_name(TypeLabel t);
std::optional<TypeLabel> parse_type_label(std::string_view name);

}  // namespace codezip
