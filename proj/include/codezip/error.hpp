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

#include <stdexcept>
#include <string>

namespace codezip {

/// Base class for every error raised by the library. The CLI maps the
/// subclasses onto its documented exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed an argument outside the documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A file or record could not be parsed against its schema.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// File system failure (unreadable / unwritable path).
class IoError : public Error {
 public:
  using Error::Error;
};

/// Checkpoint shape table or vocabulary does not match what the loader
/// expected.
class CheckpointMismatch : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during training (NaN loss, divergence).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Strict-parse mode refused code the structural parser rejects.
class UnparsableInput : public Error {
 public:
  using Error::Error;
};

/// Remote LM call failed after all retries.
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace codezip
