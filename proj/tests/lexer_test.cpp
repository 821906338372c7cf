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

#include <gtest/gtest.h>

#include <random>

#include "trackr/lexer.hpp"

namespace trackr {
namespace {

std::vector<TokenKind> kinds(const std::vector<Token>& toks) {
  std::vector<TokenKind> out;
  for (const auto& t : toks)
    if (t.kind != TokenKind::End) out.push_back(t.kind);
  return out;
}

TEST(Lexer, AssignmentCall) {
  auto toks = tokenize("d <- f(x)");
  EXPECT_EQ(kinds(toks), (std::vector<TokenKind>{TokenKind::Ident, TokenKind::Arrow, TokenKind::Ident,
                                                   TokenKind::LParen, TokenKind::Ident, TokenKind::RParen}));
  EXPECT_EQ(toks[0].text, "d");
  EXPECT_EQ(toks[2].text, "f");
  EXPECT_EQ(toks[4].text, "x");
  EXPECT_EQ(toks.back().kind, TokenKind::End);
}

TEST(Lexer, CommentThenAssignment) {
  auto toks = tokenize("# note\nx = 1");
  ASSERT_GE(toks.size(), 5u);
  EXPECT_EQ(toks[0].kind, TokenKind::Comment);
  EXPECT_EQ(toks[0].text, "note");
  EXPECT_EQ(toks[1].kind, TokenKind::Newline);
  EXPECT_EQ(toks[2].kind, TokenKind::Ident);
  EXPECT_EQ(toks[3].kind, TokenKind::Equals);
  EXPECT_EQ(toks[4].kind, TokenKind::Number);
  EXPECT_EQ(toks[4].number, 1.0);
  EXPECT_EQ(toks[2].pos, (Position{2, 1}));
}

TEST(Lexer, UnterminatedString) {
  try {
    tokenize("\"abc");
    FAIL() << "expected LexError";
  } catch (const LexError& e) {
    EXPECT_EQ(e.position().line, 1);
  }
}

TEST(Lexer, IllegalCharacter) {
  try {
    tokenize("x <- 1\ny <- $");
    FAIL() << "expected LexError";
  } catch (const LexError& e) {
    EXPECT_EQ(e.position(), (Position{2, 6}));
  }
}

TEST(Lexer, StringEscapes) {
  auto toks = tokenize(R"("a\"b\\c\nd\te")");
  ASSERT_EQ(toks[0].kind, TokenKind::String);
  EXPECT_EQ(toks[0].text, "a\"b\\c\nd\te");
}

TEST(Lexer, UnknownEscapeRejected) { EXPECT_THROW(tokenize(R"("a\qb")"), LexError); }

TEST(Lexer, Numbers) {
  auto toks = tokenize("1 2.5 0.5 1e3 2.5E-2");
  std::vector<double> want{1, 2.5, 0.5, 1000, 0.025};
  for (std::size_t i = 0; i < want.size(); ++i) {
    ASSERT_EQ(toks[i].kind, TokenKind::Number);
    EXPECT_DOUBLE_EQ(toks[i].number, want[i]);
  }
}

TEST(Lexer, OperatorsAndPunctuation) {
  auto toks = tokenize("a[1]; b + c - d * e / f, g");
  EXPECT_EQ(kinds(toks),
            (std::vector<TokenKind>{TokenKind::Ident, TokenKind::LBracket, TokenKind::Number,
                                    TokenKind::RBracket, TokenKind::Semicolon, TokenKind::Ident,
                                    TokenKind::Plus, TokenKind::Ident, TokenKind::Minus, TokenKind::Ident,
                                    TokenKind::Star, TokenKind::Ident, TokenKind::Slash, TokenKind::Ident,
                                    TokenKind::Comma, TokenKind::Ident}));
}

TEST(Lexer, LeadingDotIsIllegal) {
  EXPECT_THROW(tokenize(".5"), LexError);
  EXPECT_THROW(tokenize(".x <- 1"), LexError);
}

TEST(Lexer, LessThanAloneIsIllegal) { EXPECT_THROW(tokenize("a < b"), LexError); }

TEST(Lexer, DottedAndUnderscoreIdentifiers) {
  auto toks = tokenize("my.var_2 <- read_csv(\"f\")");
  EXPECT_EQ(toks[0].text, "my.var_2");
  EXPECT_TRUE(is_identifier("my.var_2"));
  EXPECT_FALSE(is_identifier("2x"));
  EXPECT_FALSE(is_identifier(""));
  EXPECT_TRUE(is_reserved_word("TRUE"));
  EXPECT_TRUE(is_reserved_word("FALSE"));
}

TEST(Lexer, ArbitraryBytesOnlyRaiseLexError) {
  std::mt19937_64 rng(77);
  const std::string alphabet = "abcxyz019 <-=()[],;+-*/#\"\\\n\t.eE_$@!\x80\xff";
  for (int round = 0; round < 3000; ++round) {
    std::string s;
    std::size_t len = rng() % 40;
    for (std::size_t i = 0; i < len; ++i) {
      if (rng() % 8 == 0)
        s.push_back(static_cast<char>(rng() & 0xff));
      else
        s.push_back(alphabet[rng() % alphabet.size()]);
    }
    try {
      auto toks = tokenize(s);
      ASSERT_FALSE(toks.empty());
      ASSERT_EQ(toks.back().kind, TokenKind::End);
    } catch (const LexError& e) {
      ASSERT_GE(e.position().line, 1);
      ASSERT_GE(e.position().column, 1);
    }
  }
}

}  // namespace
}  // namespace trackr
