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

#include "trackr/parser.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "trackr/lexer.hpp"

namespace trackr {
namespace {

constexpr int kMaxDepth = 200;

class Parser {
 public:
  explicit Parser(std::vector<Token> all) {
    for (auto& t : all) {
      if (t.kind == TokenKind::Comment) {
        comments_.push_back(std::move(t));
      } else {
        toks_.push_back(std::move(t));
      }
    }
  }

  Program program() {
    Program p;
    skip_separators();
    while (peek().kind != TokenKind::End) {
      TopExpr e = top();
      e.index = p.exprs.size();
      p.exprs.push_back(std::move(e));
      const Token& t = peek();
      if (t.kind != TokenKind::Newline && t.kind != TokenKind::Semicolon &&
          t.kind != TokenKind::End) {
        fail({"newline", "';'", "end of input"}, t);
      }
      skip_separators();
    }
    attach_comments(p);
    return p;
  }

  Expr single_expr() {
    skip_separators();
    Expr e = expr();
    skip_separators();
    if (peek().kind != TokenKind::End) fail({"end of input"}, peek());
    return e;
  }

 private:
  // Inside () or [] newlines are insignificant.
  std::size_t skip_index(std::size_t k) const {
    if (nesting_ > 0) {
      while (toks_[k].kind == TokenKind::Newline) ++k;
    }
    return k;
  }

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = skip_index(i_);
    for (std::size_t n = 0; n < ahead && toks_[k].kind != TokenKind::End; ++n) {
      k = skip_index(k + 1);
    }
    return toks_[k];
  }

  Token take() {
    i_ = skip_index(i_);
    Token t = toks_[i_];
    last_end_ = t.end;
    if (t.kind != TokenKind::End) ++i_;
    return t;
  }

  bool accept(TokenKind kind) {
    if (peek().kind != kind) return false;
    take();
    return true;
  }

  Token expect(TokenKind kind) {
    if (peek().kind != kind) fail({describe(kind)}, peek());
    return take();
  }

  void skip_newlines() {
    while (toks_[i_].kind == TokenKind::Newline) ++i_;
  }

  void skip_separators() {
    while (toks_[i_].kind == TokenKind::Newline || toks_[i_].kind == TokenKind::Semicolon) ++i_;
  }

  [[noreturn]] void fail(std::vector<std::string> expected, const Token& found) const {
    std::string what = describe(found.kind);
    if (found.kind == TokenKind::Ident || found.kind == TokenKind::Number) {
      what += " '" + found.text + "'";
    }
    throw ParseError(found.pos, std::move(expected), what);
  }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser, Position pos) : p(parser) {
      if (++p.depth_ > kMaxDepth) throw ParseError(pos, "expression nested too deeply");
    }
    ~DepthGuard() { --p.depth_; }
  };

  struct Nest {
    Parser& p;
    explicit Nest(Parser& parser) : p(parser) { ++p.nesting_; }
    ~Nest() { --p.nesting_; }
  };

  TopExpr top() {
    TopExpr out;
    const Token& first = peek();
    out.span.begin = first.pos;
    if (first.kind == TokenKind::Ident && first.text == "library" &&
        peek(1).kind == TokenKind::LParen) {
      take();
      Nest nest(*this);
      take();
      const Token& name = peek();
      if (name.kind != TokenKind::Ident && name.kind != TokenKind::String) {
        fail({"package name"}, name);
      }
      if (name.text.empty()) throw ParseError(name.pos, "empty package name");
      out.kind = ast::Load{take().text};
      expect(TokenKind::RParen);
    } else if (first.kind == TokenKind::Ident &&
               (peek(1).kind == TokenKind::Arrow || peek(1).kind == TokenKind::Equals)) {
      if (is_reserved_word(first.text)) {
        throw ParseError(first.pos, "cannot assign to reserved word '" + first.text + "'");
      }
      std::string target = take().text;
      take();
      skip_newlines();
      out.kind = ast::Assign{std::move(target), expr()};
    } else {
      out.kind = ast::ExprStmt{expr()};
    }
    out.span.end = last_end_;
    return out;
  }

  Expr expr() { return additive(); }

  Expr make_binop(char op, Expr lhs, Expr rhs) {
    Span span{lhs.span.begin, rhs.span.end};
    return Expr{ast::BinOp{op, std::move(lhs), std::move(rhs)}, span};
  }

  Expr additive() {
    Expr lhs = multiplicative();
    while (peek().kind == TokenKind::Plus || peek().kind == TokenKind::Minus) {
      char op = take().kind == TokenKind::Plus ? '+' : '-';
      skip_newlines();
      lhs = make_binop(op, std::move(lhs), multiplicative());
    }
    return lhs;
  }

  Expr multiplicative() {
    Expr lhs = unary();
    while (peek().kind == TokenKind::Star || peek().kind == TokenKind::Slash) {
      char op = take().kind == TokenKind::Star ? '*' : '/';
      skip_newlines();
      lhs = make_binop(op, std::move(lhs), unary());
    }
    return lhs;
  }

  Expr unary() {
    if (peek().kind != TokenKind::Minus) return postfix();
    Token minus = take();
    DepthGuard guard(*this, minus.pos);
    skip_newlines();
    Expr operand = unary();
    Span span{minus.pos, operand.span.end};
    if (auto* n = std::get_if<ast::Num>(&operand.node)) {
      return Expr{ast::Num{-n->value}, span};
    }
    Expr zero{ast::Num{0}, {minus.pos, minus.pos}};
    return Expr{ast::BinOp{'-', std::move(zero), std::move(operand)}, span};
  }

  Expr postfix() {
    Expr base = primary();
    while (peek().kind == TokenKind::LBracket) {
      Nest nest(*this);
      take();
      const Token& key = peek();
      std::variant<std::string, std::int64_t> k;
      if (key.kind == TokenKind::String) {
        k = take().text;
      } else if (key.kind == TokenKind::Number) {
        double v = key.number;
        if (v < 1 || v != std::floor(v) || v > 9.0e15) {
          throw ParseError(key.pos, "index position must be a positive integer");
        }
        take();
        k = static_cast<std::int64_t>(v);
      } else {
        fail({"string", "integer"}, key);
      }
      expect(TokenKind::RBracket);
      Span span{base.span.begin, last_end_};
      base = Expr{ast::Index{std::move(base), std::move(k)}, span};
    }
    return base;
  }

  Expr primary() {
    const Token& t = peek();
    DepthGuard guard(*this, t.pos);
    switch (t.kind) {
      case TokenKind::Number: {
        Token n = take();
        return Expr{ast::Num{n.number}, {n.pos, n.end}};
      }
      case TokenKind::String: {
        Token s = take();
        return Expr{ast::Str{std::move(s.text)}, {s.pos, s.end}};
      }
      case TokenKind::Ident: {
        if (t.text == "TRUE" || t.text == "FALSE") {
          Token b = take();
          return Expr{ast::Bool{b.text == "TRUE"}, {b.pos, b.end}};
        }
        if (t.text == "library") {
          throw ParseError(t.pos, "library() is only allowed as a top-level statement");
        }
        if (peek(1).kind == TokenKind::LParen) return call();
        Token v = take();
        return Expr{ast::Var{std::move(v.text)}, {v.pos, v.end}};
      }
      case TokenKind::LParen: {
        Nest nest(*this);
        Token open = take();
        Expr inner = expr();
        expect(TokenKind::RParen);
        inner.span = {open.pos, last_end_};
        return inner;
      }
      case TokenKind::LBracket: {
        Nest nest(*this);
        Token open = take();
        ast::List list;
        if (!accept(TokenKind::RBracket)) {
          while (true) {
            list.items.push_back(expr());
            if (accept(TokenKind::Comma)) continue;
            if (peek().kind == TokenKind::RBracket) {
              take();
              break;
            }
            fail({"','", "']'"}, peek());
          }
        }
        return Expr{std::move(list), {open.pos, last_end_}};
      }
      default:
        fail({"expression"}, t);
    }
  }

  Expr call() {
    Token name = take();
    Nest nest(*this);
    take();  // (
    ast::Call c;
    c.fn = name.text;
    std::set<std::string> seen;
    if (!accept(TokenKind::RParen)) {
      while (true) {
        if (peek().kind == TokenKind::Ident && peek(1).kind == TokenKind::Equals) {
          Token key = take();
          take();
          if (!seen.insert(key.text).second) {
            throw ParseError(key.pos, "duplicate named argument '" + key.text + "'");
          }
          c.named.push_back({key.text, expr()});
        } else {
          c.args.push_back(expr());
        }
        if (accept(TokenKind::Comma)) continue;
        if (peek().kind == TokenKind::RParen) {
          take();
          break;
        }
        fail({"','", "')'"}, peek());
      }
    }
    return Expr{std::move(c), {name.pos, last_end_}};
  }

  void attach_comments(Program& p) {
    std::size_t e = 0;
    for (auto& c : comments_) {
      auto before = [&](const Position& a, const Position& b) {
        return a.line < b.line || (a.line == b.line && a.column < b.column);
      };
      while (e < p.exprs.size() && !before(c.pos, p.exprs[e].span.begin)) ++e;
      if (e < p.exprs.size()) {
        p.exprs[e].leading_comments.push_back(std::move(c.text));
      } else {
        p.trailing_comments.push_back(std::move(c.text));
      }
    }
  }

  std::vector<Token> toks_;
  std::vector<Token> comments_;
  std::size_t i_ = 0;
  int nesting_ = 0;
  int depth_ = 0;
  Position last_end_;
};

// Binding strength used to decide parenthesization.
enum Level { kAdd = 1, kMul = 2, kUnary = 3, kAtom = 4 };

int level(const Expr& e) {
  if (auto* b = e.as<ast::BinOp>()) return (b->op == '+' || b->op == '-') ? kAdd : kMul;
  if (auto* n = e.as<ast::Num>()) {
    if (std::signbit(n->value) || !std::isfinite(n->value)) return kUnary;
  }
  return kAtom;
}

void emit(const Expr& e, std::string& out);

void emit_at(const Expr& e, int min_level, std::string& out) {
  if (level(e) < min_level) {
    out += '(';
    emit(e, out);
    out += ')';
  } else {
    emit(e, out);
  }
}

void emit(const Expr& e, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ast::Var>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, ast::Str>) {
          out += quote_string(n.text);
        } else if constexpr (std::is_same_v<T, ast::Num>) {
          out += format_number(n.value);
        } else if constexpr (std::is_same_v<T, ast::Bool>) {
          out += n.value ? "TRUE" : "FALSE";
        } else if constexpr (std::is_same_v<T, ast::List>) {
          out += '[';
          for (std::size_t i = 0; i < n.items.size(); ++i) {
            if (i) out += ", ";
            emit(n.items[i], out);
          }
          out += ']';
        } else if constexpr (std::is_same_v<T, ast::Call>) {
          out += n.fn;
          out += '(';
          bool first = true;
          for (const auto& a : n.args) {
            if (!first) out += ", ";
            first = false;
            emit(a, out);
          }
          for (const auto& a : n.named) {
            if (!first) out += ", ";
            first = false;
            out += a.name;
            out += " = ";
            emit(*a.value, out);
          }
          out += ')';
        } else if constexpr (std::is_same_v<T, ast::BinOp>) {
          int lv = (n.op == '+' || n.op == '-') ? kAdd : kMul;
          emit_at(*n.lhs, lv, out);
          out += ' ';
          out += n.op;
          out += ' ';
          emit_at(*n.rhs, lv + 1, out);
        } else if constexpr (std::is_same_v<T, ast::Index>) {
          emit_at(*n.base, kAtom, out);
          out += '[';
          if (auto* s = std::get_if<std::string>(&n.key)) {
            out += quote_string(*s);
          } else {
            out += std::to_string(std::get<std::int64_t>(n.key));
          }
          out += ']';
        }
      },
      e.node);
}

}  // namespace

Program parse_program(std::string_view source, std::optional<std::string> source_name) {
  Parser parser(tokenize(source));
  Program p = parser.program();
  p.source_name = std::move(source_name);
  return p;
}

Expr parse_expr(std::string_view source) { return Parser(tokenize(source)).single_expr(); }

std::string quote_string(std::string_view s) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "\"";
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (u < 0x20 || u == 0x7f) {
          out += "\\x";
          out += kHex[u >> 4];
          out += kHex[u & 0xf];
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "(0 / 0)";
  if (std::isinf(v)) return v > 0 ? "(1 / 0)" : "(-1 / 0)";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string deparse(const Expr& e) {
  std::string out;
  emit(e, out);
  return out;
}

std::string deparse(const TopExpr& e) {
  if (auto* a = e.as<ast::Assign>()) return a->target + " <- " + deparse(a->value);
  if (auto* s = e.as<ast::ExprStmt>()) return deparse(s->value);
  const auto& pkg = e.as<ast::Load>()->package;
  return "library(" + (is_identifier(pkg) && !is_reserved_word(pkg) ? pkg : quote_string(pkg)) +
         ")";
}

std::string deparse(const Program& p) {
  std::string out;
  for (const auto& e : p.exprs) {
    out += deparse(e);
    out += '\n';
  }
  return out;
}

}  // namespace trackr
