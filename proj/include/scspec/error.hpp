// Copyright 2026 The scspec Authors
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

#include <stdexcept>
#include <string>

namespace scspec {

/// Base error. `code()` is a short machine-readable token ("parse", "range",
/// "stage", ...) used by the CLI error line and the HTTP error body.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string &message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string &code() const { return code_; }

 private:
  std::string code_;
};

/// Malformed input file. Row/column are 1-based positions in the source text
/// (0 when not applicable).
class ParseError : public Error {
 public:
  ParseError(const std::string &message, int row = 0, int col = 0)
      : Error("parse", format(message, row, col)), row_(row), col_(col) {}
  int row() const { return row_; }
  int col() const { return col_; }

 private:
  static std::string format(const std::string &m, int row, int col) {
    if (row == 0 && col == 0) return m;
    return m + " (row " + std::to_string(row) + ", column " + std::to_string(col) + ")";
  }
  int row_;
  int col_;
};

/// A precondition on argument values failed.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string &message, std::string field = {})
      : Error("invalid_argument", message), field_(std::move(field)) {}
  const std::string &field() const { return field_; }

 private:
  std::string field_;
};

/// Numerical procedure failed (eigensolver, fit non-convergence, size cap).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string &message) : Error("numerical", message) {}
};

}  // namespace scspec
