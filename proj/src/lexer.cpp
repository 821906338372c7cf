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

#include "trackr/lexer.hpp"

#include <charconv>
#include <cstdio>

namespace trackr {
namespace {

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9') || c == '.'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
        continue;
      }
      Position start = here();
      if (c == '\n') {
        advance();
        out.push_back({TokenKind::Newline, "\n", 0, start, here()});
      } else if (c == '#') {
        std::size_t b = i_;
        while (i_ < src_.size() && src_[i_] != '\n') advance();
        out.push_back({TokenKind::Comment, trim(src_.substr(b + 1, i_ - b - 1)), 0, start, here()});
      } else if (ident_start(c)) {
        std::size_t b = i_;
        while (i_ < src_.size() && ident_char(src_[i_])) advance();
        out.push_back({TokenKind::Ident, std::string(src_.substr(b, i_ - b)), 0, start, here()});
      } else if (digit(c)) {
        out.push_back(number(start));
      } else if (c == '"') {
        out.push_back(string(start));
      } else {
        out.push_back(punct(start));
      }
    }
    out.push_back({TokenKind::End, "", 0, here(), here()});
    return out;
  }

 private:
  Position here() const { return {line_, col_}; }

  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  bool at_digit(std::size_t k) const { return k < src_.size() && digit(src_[k]); }

  Token number(Position start) {
    std::size_t b = i_;
    while (at_digit(i_)) advance();
    if (i_ + 1 < src_.size() && src_[i_] == '.' && at_digit(i_ + 1)) {
      advance();
      while (at_digit(i_)) advance();
    }
    if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
      std::size_t k = i_ + 1;
      if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
      if (at_digit(k)) {
        while (i_ < k) advance();
        while (at_digit(i_)) advance();
      }
    }
    std::string_view lexeme = src_.substr(b, i_ - b);
    double value = 0;
    auto [ptr, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), value);
    if (ec != std::errc() || ptr != lexeme.data() + lexeme.size()) {
      throw LexError(start, "number out of range: " + std::string(lexeme));
    }
    return {TokenKind::Number, std::string(lexeme), value, start, here()};
  }

  Token string(Position start) {
    advance();  // opening quote
    std::string text;
    while (true) {
      if (i_ >= src_.size()) throw LexError(start, "unterminated string");
      char c = src_[i_];
      if (c == '"') {
        advance();
        break;
      }
      if (c != '\\') {
        text.push_back(c);
        advance();
        continue;
      }
      Position esc = here();
      advance();
      if (i_ >= src_.size()) throw LexError(start, "unterminated string");
      char e = src_[i_];
      advance();
      switch (e) {
        case '"': text.push_back('"'); break;
        case '\\': text.push_back('\\'); break;
        case 'n': text.push_back('\n'); break;
        case 't': text.push_back('\t'); break;
        case 'r': text.push_back('\r'); break;
        case 'x': {
          int hi = i_ < src_.size() ? hex_value(src_[i_]) : -1;
          int lo = i_ + 1 < src_.size() ? hex_value(src_[i_ + 1]) : -1;
          if (hi < 0 || lo < 0) throw LexError(esc, "bad \\x escape");
          advance();
          advance();
          text.push_back(static_cast<char>(hi * 16 + lo));
          break;
        }
        default:
          throw LexError(esc, std::string("unknown escape \\") + (e == '\n' ? 'n' : e));
      }
    }
    return {TokenKind::String, std::move(text), 0, start, here()};
  }

  Token punct(Position start) {
    char c = src_[i_];
    TokenKind kind;
    std::string text(1, c);
    switch (c) {
      case '<':
        if (i_ + 1 < src_.size() && src_[i_ + 1] == '-') {
          advance();
          kind = TokenKind::Arrow;
          text = "<-";
          break;
        }
        throw LexError(start, "illegal character '<'");
      case '=': kind = TokenKind::Equals; break;
      case '(': kind = TokenKind::LParen; break;
      case ')': kind = TokenKind::RParen; break;
      case '[': kind = TokenKind::LBracket; break;
      case ']': kind = TokenKind::RBracket; break;
      case ',': kind = TokenKind::Comma; break;
      case ';': kind = TokenKind::Semicolon; break;
      case '+': kind = TokenKind::Plus; break;
      case '-': kind = TokenKind::Minus; break;
      case '*': kind = TokenKind::Star; break;
      case '/': kind = TokenKind::Slash; break;
      default: {
        char buf[32];
        auto u = static_cast<unsigned char>(c);
        if (u >= 0x21 && u < 0x7f) {
          std::snprintf(buf, sizeof buf, "illegal character '%c'", c);
        } else {
          std::snprintf(buf, sizeof buf, "illegal byte 0x%02x", u);
        }
        throw LexError(start, buf);
      }
    }
    advance();
    return {kind, std::move(text), 0, start, here()};
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

const char* describe(TokenKind kind) {
  switch (kind) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::Number: return "number";
    case TokenKind::String: return "string";
    case TokenKind::Arrow: return "'<-'";
    case TokenKind::Equals: return "'='";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::Comma: return "','";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::Newline: return "newline";
    case TokenKind::Comment: return "comment";
    case TokenKind::End: return "end of input";
  }
  return "token";
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

bool is_identifier(std::string_view s) {
  if (s.empty() || !ident_start(s[0])) return false;
  for (char c : s) {
    if (!ident_char(c)) return false;
  }
  return true;
}

bool is_reserved_word(std::string_view s) { return s == "TRUE" || s == "FALSE" || s == "library"; }

}  // namespace trackr
