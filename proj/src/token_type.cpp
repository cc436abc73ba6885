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

#include "codezip/token_type.hpp"

namespace codezip {

std::string_view type_label_name(TypeLabel t) {
  switch (t) {
    case TypeLabel::kSymbol:
      return "Symbol";
    case TypeLabel::kSignature:
      return "Signature";
    case TypeLabel::kInvocation:
      return "Invocation";
    case TypeLabel::kIdentifier:
      return "Identifier";
    case TypeLabel::kStructure:
      return "Structure";
    case TypeLabel::kOutOfType:
      return "OutOfType";
  }
  return "OutOfType";
}

std::optional<TypeLabel> parse_type_label(std::string_view name) {
  for (auto t : {TypeLabel::kSymbol, TypeLabel::kSignature, TypeLabel::kInvocation,
                 TypeLabel::kIdentifier, TypeLabel::kStructure, TypeLabel::kOutOfType}) {
    if (type_label_name(t) == name) return t;
  }
  return std::nullopt;
}

}  // namespace codezip
