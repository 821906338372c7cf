/*
 * Copyright 2026 The trackr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace trackr {

/// 1-based source position.
struct Position {
  int line = 1;
  int column = 1;

  friend bool operator==(const Position&, const Position&) = default;
};

struct Span {
  Position begin;
  Position end;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LexError : public Error {
 public:
  LexError(Position pos, const std::string& message);
  Position position() const { return pos_; }

 private:
  Position pos_;
};

class ParseError : public Error {
 public:
  ParseError(Position pos, std::vector<std::string> expected, const std::string& found = {});
  ParseError(Position pos, const std::string& message);
  Position position() const { return pos_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  Position pos_;
  std::vector<std::string> expected_;
};

/// `target` has no definition at or before the requested index.
class UnknownTarget : public Error {
 public:
  explicit UnknownTarget(const std::string& target)
      : Error("unknown target: " + target), target_(target) {}
  const std::string& target() const { return target_; }

 private:
  std::string target_;
};

enum class EvalErrorKind {
  UnknownVariable,
  UnknownFunction,
  ArityError,
  TypeError,
  FormulaError,
  SingularDesign,
  FileError,
};

const char* to_string(EvalErrorKind kind);

class EvalError : public Error {
 public:
  EvalError(EvalErrorKind kind, const std::string& message);
  EvalErrorKind kind() const { return kind_; }
  const Span& span() const { return span_; }
  bool located() const { return located_; }
  /// Message without the kind prefix or position.
  const std::string& detail() const { return detail_; }
  /// Records the innermost expression span; later calls are ignored.
  void locate(Span span) {
    if (located_) return;
    span_ = span;
    located_ = true;
  }

 private:
  EvalErrorKind kind_;
  std::string detail_;
  Span span_;
  bool located_ = false;
};

class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

class CorruptStore : public BackendError {
 public:
  CorruptStore(std::size_t offset, const std::string& message)
      : BackendError("corrupt store at byte " + std::to_string(offset) + ": " + message),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class BadPattern : public Error {
 public:
  using Error::Error;
};

class ChunkEvalError : public Error {
 public:
  ChunkEvalError(std::string label, const std::string& message)
      : Error("chunk '" + label + "': " + message), label_(std::move(label)) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

}  // namespace trackr
