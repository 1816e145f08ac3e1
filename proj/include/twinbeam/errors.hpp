// Copyright 2026 The twinbeam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace twinbeam {

/// Base of every error thrown by the library. The C API maps each subclass
/// onto a distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Fock occupation does not fit under the caller-supplied cutoff.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented invariant (non-Hermitian density matrix,
/// non-PSD covariance, malformed fit configuration, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of the call was not met by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Evaluation outside the mathematical domain, e.g. the u = 0 pole of the
/// phase-difference spectrum or a nonpositive power handed to a dB conversion.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Truncated state carries more weight outside the cutoff than allowed.
class TruncationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : ParseError(line, "line " + std::to_string(line) + ": " + message) {}

  /// Same error with the originating source, e.g. a file name, prefixed.
  ParseError with_source(const std::string& source) const {
    return ParseError(line_, source + ": " + what());
  }

  std::size_t line() const noexcept { return line_; }

 private:
  ParseError(std::size_t line, const std::string& full) : Error(full), line_(line) {}

  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace twinbeam
