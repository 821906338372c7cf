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

#include <string>
#include <string_view>
#include <vector>

#include "trackr/error.hpp"

namespace trackr {

enum class TokenKind {
  Ident,
  Number,
  String,
  Arrow,      // <-
  Equals,     // =
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Semicolon,
  Plus,
  Minus,
  Star,
  Slash,
  Newline,
  Comment,
  End,
};

const char* describe(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::End;
  /// Identifier name, decoded string contents, comment text, or number lexeme.
  std::string text;
  double number = 0;
  Position pos;
  Position end;
};

/// Splits Tracklang source into tokens. The result always ends with an End
/// token. Throws LexError on an unterminated string, a bad escape or an
/// illegal character.
std::vector<Token> tokenize(std::string_view source);

bool is_identifier(std::string_view s);
bool is_reserved_word(std::string_view s);

}  // namespace trackr
