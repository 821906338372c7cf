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

#include "trackr/error.hpp"

namespace trackr {
namespace {

std::string at(Position pos) {
  return std::to_string(pos.line) + ":" + std::to_string(pos.column);
}

std::string expected_message(const std::vector<std::string>& expected, const std::string& found) {
  std::string msg = "expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i > 0) msg += i + 1 == expected.size() ? " or " : ", ";
    msg += expected[i];
  }
  if (!found.empty()) msg += ", found " + found;
  return msg;
}

}  // namespace

LexError::LexError(Position pos, const std::string& message)
    : Error(at(pos) + ": " + message), pos_(pos) {}

ParseError::ParseError(Position pos, std::vector<std::string> expected, const std::string& found)
    : Error(at(pos) + ": " + expected_message(expected, found)),
      pos_(pos),
      expected_(std::move(expected)) {}

ParseError::ParseError(Position pos, const std::string& message)
    : Error(at(pos) + ": " + message), pos_(pos) {}

const char* to_string(EvalErrorKind kind) {
  switch (kind) {
    case EvalErrorKind::UnknownVariable: return "UnknownVariable";
    case EvalErrorKind::UnknownFunction: return "UnknownFunction";
    case EvalErrorKind::ArityError: return "ArityError";
    case EvalErrorKind::TypeError: return "TypeError";
    case EvalErrorKind::FormulaError: return "FormulaError";
    case EvalErrorKind::SingularDesign: return "SingularDesign";
    case EvalErrorKind::FileError: return "FileError";
  }
  return "EvalError";
}

EvalError::EvalError(EvalErrorKind kind, const std::string& message)
    : Error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

}  // namespace trackr
