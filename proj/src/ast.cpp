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

#include "trackr/ast.hpp"

namespace trackr {

namespace {

struct NodeEq {
  const Expr& rhs;

  bool operator()(const ast::Var& a) const { return a.name == std::get<ast::Var>(rhs.node).name; }
  bool operator()(const ast::Str& a) const { return a.text == std::get<ast::Str>(rhs.node).text; }
  bool operator()(const ast::Num& a) const {
    return a.value == std::get<ast::Num>(rhs.node).value;
  }
  bool operator()(const ast::Bool& a) const {
    return a.value == std::get<ast::Bool>(rhs.node).value;
  }
  bool operator()(const ast::List& a) const { return a.items == std::get<ast::List>(rhs.node).items; }
  bool operator()(const ast::Call& a) const {
    const auto& b = std::get<ast::Call>(rhs.node);
    if (a.fn != b.fn || a.args != b.args || a.named.size() != b.named.size()) return false;
    for (std::size_t i = 0; i < a.named.size(); ++i) {
      if (a.named[i].name != b.named[i].name || !(*a.named[i].value == *b.named[i].value))
        return false;
    }
    return true;
  }
  bool operator()(const ast::BinOp& a) const {
    const auto& b = std::get<ast::BinOp>(rhs.node);
    return a.op == b.op && *a.lhs == *b.lhs && *a.rhs == *b.rhs;
  }
  bool operator()(const ast::Index& a) const {
    const auto& b = std::get<ast::Index>(rhs.node);
    return a.key == b.key && *a.base == *b.base;
  }
};

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(NodeEq{b}, a.node);
}

bool same_structure(const TopExpr& a, const TopExpr& b) {
  if (a.kind.index() != b.kind.index()) return false;
  if (auto* x = a.as<ast::Assign>()) {
    auto* y = b.as<ast::Assign>();
    return x->target == y->target && x->value == y->value;
  }
  if (auto* x = a.as<ast::ExprStmt>()) return x->value == b.as<ast::ExprStmt>()->value;
  return a.as<ast::Load>()->package == b.as<ast::Load>()->package;
}

bool same_structure(const Program& a, const Program& b) {
  if (a.exprs.size() != b.exprs.size()) return false;
  for (std::size_t i = 0; i < a.exprs.size(); ++i) {
    if (!same_structure(a.exprs[i], b.exprs[i])) return false;
  }
  return true;
}

Program subprogram(const Program& p, const std::vector<std::size_t>& indices) {
  Program out;
  out.source_name = p.source_name;
  out.exprs.reserve(indices.size());
  for (std::size_t i : indices) {
    TopExpr e = p.exprs.at(i);
    e.index = out.exprs.size();
    out.exprs.push_back(std::move(e));
  }
  return out;
}

}  // namespace trackr
