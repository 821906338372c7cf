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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "trackr/error.hpp"

namespace trackr {

/// Owning pointer with value semantics, used for recursive AST nodes.
template <typename T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  const T& operator*() const { return *ptr_; }
  T& operator*() { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  T* operator->() { return ptr_.get(); }

 private:
  std::unique_ptr<T> ptr_;
};

struct Expr;

namespace ast {

struct Var {
  std::string name;
};
struct Str {
  std::string text;
};
struct Num {
  double value = 0;
};
struct Bool {
  bool value = false;
};
struct List {
  std::vector<Expr> items;
};
struct NamedArg {
  std::string name;
  Box<Expr> value;
};
struct Call {
  std::string fn;
  std::vector<Expr> args;
  std::vector<NamedArg> named;
};
struct BinOp {
  char op = '+';  // one of + - * /
  Box<Expr> lhs;
  Box<Expr> rhs;
};
/// `base["field"]` or `base[position]` (1-based).
struct Index {
  Box<Expr> base;
  std::variant<std::string, std::int64_t> key;
};

}  // namespace ast

struct Expr {
  std::variant<ast::Var, ast::Str, ast::Num, ast::Bool, ast::List, ast::Call, ast::BinOp, ast::Index>
      node;
  Span span;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
};

/// Equality of expression trees, ignoring spans.
bool operator==(const Expr& a, const Expr& b);

namespace ast {

struct Assign {
  std::string target;
  Expr value;
};
struct ExprStmt {
  Expr value;
};
/// `library(pkg)`.
struct Load {
  std::string package;
};

}  // namespace ast

struct TopExpr {
  std::size_t index = 0;
  std::variant<ast::Assign, ast::ExprStmt, ast::Load> kind;
  Span span;
  std::vector<std::string> leading_comments;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&kind);
  }
};

/// Equality of kinds only (ignores index, span and comments).
bool same_structure(const TopExpr& a, const TopExpr& b);

struct Program {
  std::vector<TopExpr> exprs;
  std::optional<std::string> source_name;
  /// Comments after the last expression.
  std::vector<std::string> trailing_comments;

  std::size_t size() const { return exprs.size(); }
  bool empty() const { return exprs.empty(); }
};

bool same_structure(const Program& a, const Program& b);

/// Exprs at `indices`, re-indexed 0..n-1.
Program subprogram(const Program& p, const std::vector<std::size_t>& indices);

}  // namespace trackr
