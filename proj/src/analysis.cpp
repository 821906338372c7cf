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

#include "trackr/analysis.hpp"

#include <algorithm>

#include "trackr/builtins.hpp"
#include "trackr/parser.hpp"

namespace trackr {
namespace {

struct Usage {
  std::set<std::string> vars;
  std::set<std::string> functions;
  std::set<std::string> strings;
  bool reads_rng = false;
  bool writes_rng = false;
};

void collect(const Expr& e, Usage& u) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ast::Var>) {
          u.vars.insert(n.name);
        } else if constexpr (std::is_same_v<T, ast::Str>) {
          u.strings.insert(n.text);
        } else if constexpr (std::is_same_v<T, ast::List>) {
          for (const auto& item : n.items) collect(item, u);
        } else if constexpr (std::is_same_v<T, ast::Call>) {
          u.functions.insert(n.fn);
          if (auto info = builtin_info(n.fn)) {
            u.reads_rng |= info->reads_rng;
            u.writes_rng |= info->writes_rng;
          }
          for (const auto& a : n.args) collect(a, u);
          for (const auto& a : n.named) collect(*a.value, u);
        } else if constexpr (std::is_same_v<T, ast::BinOp>) {
          collect(*n.lhs, u);
          collect(*n.rhs, u);
        } else if constexpr (std::is_same_v<T, ast::Index>) {
          collect(*n.base, u);
          if (auto* s = std::get_if<std::string>(&n.key)) u.strings.insert(*s);
        }
      },
      e.node);
}

Usage usage_of(const TopExpr& t) {
  Usage u;
  if (auto* a = t.as<ast::Assign>()) collect(a->value, u);
  if (auto* s = t.as<ast::ExprStmt>()) collect(s->value, u);
  return u;
}

std::optional<std::string> package_of(const std::string& fn) {
  auto info = builtin_info(fn);
  if (!info || info->package == kBasePackage) return std::nullopt;
  return std::string(info->package);
}

std::set<std::string> used_symbols(const Usage& u) {
  std::set<std::string> out = u.vars;
  for (const auto& fn : u.functions) {
    if (auto pkg = package_of(fn)) out.insert(kPackageSymbolPrefix + *pkg);
  }
  if (u.reads_rng) out.insert(kRngSymbol);
  return out;
}

std::set<std::string> defined_symbols(const TopExpr& t, const Usage& u) {
  std::set<std::string> out;
  if (auto* a = t.as<ast::Assign>()) out.insert(a->target);
  if (auto* l = t.as<ast::Load>()) out.insert(kPackageSymbolPrefix + l->package);
  if (u.writes_rng) out.insert(kRngSymbol);
  return out;
}

std::vector<std::size_t> closure(const Program& p, std::size_t root) {
  DefUseGraph g = def_use_graph(p);
  std::vector<bool> in(p.size(), false);
  std::vector<std::size_t> stack{root};
  in[root] = true;
  while (!stack.empty()) {
    std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t j : g.edges[i]) {
      if (!in[j]) {
        in[j] = true;
        stack.push_back(j);
      }
    }
  }

  // Every earlier library() of a package called within the slice.
  std::set<std::string> packages;
  for (std::size_t i = 0; i <= root; ++i) {
    if (!in[i]) continue;
    for (const auto& fn : usage_of(p.exprs[i]).functions) {
      if (auto pkg = package_of(fn)) packages.insert(*pkg);
    }
  }
  for (std::size_t i = 0; i < root; ++i) {
    if (auto* l = p.exprs[i].as<ast::Load>(); l && packages.count(l->package)) in[i] = true;
  }

  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (in[i]) out.push_back(i);
  }
  return out;
}

}  // namespace

DefUseGraph def_use_graph(const Program& p) {
  DefUseGraph g;
  g.uses.resize(p.size());
  g.edges.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    Usage u = usage_of(p.exprs[i]);
    g.uses[i] = used_symbols(u);
    for (const auto& sym : g.uses[i]) {
      auto it = g.defs.find(sym);
      if (it != g.defs.end() && !it->second.empty()) g.edges[i].insert(it->second.back());
    }
    for (const auto& sym : defined_symbols(p.exprs[i], u)) g.defs[sym].push_back(i);
  }
  return g;
}

std::vector<std::size_t> backward_slice(const Program& p, const std::string& target) {
  if (p.empty()) throw UnknownTarget(target);
  return backward_slice(p, target, p.size() - 1);
}

std::vector<std::size_t> backward_slice(const Program& p, const std::string& target,
                                        std::size_t at) {
  std::optional<std::size_t> def;
  for (std::size_t i = 0; i < p.size() && i <= at; ++i) {
    if (auto* a = p.exprs[i].as<ast::Assign>(); a && a->target == target) def = i;
  }
  if (!def) throw UnknownTarget(target);
  return closure(p, *def);
}

std::vector<std::size_t> backward_slice_from(const Program& p, std::size_t root) {
  if (root >= p.size()) throw std::out_of_range("slice root out of range");
  return closure(p, root);
}

CodeFeatures extract_code_features(const Program& p, const std::vector<std::size_t>& slice) {
  CodeFeatures f;
  std::set<std::string> assigned;
  for (std::size_t i : slice) {
    const TopExpr& t = p.exprs.at(i);
    Usage u = usage_of(t);
    for (const auto& v : u.vars) {
      if (!assigned.count(v)) f.input_vars.insert(v);
    }
    f.functions.insert(u.functions.begin(), u.functions.end());
    f.string_constants.insert(u.strings.begin(), u.strings.end());
    if (auto* a = t.as<ast::Assign>()) assigned.insert(a->target);
    if (auto* l = t.as<ast::Load>()) f.packages.insert(l->package);
    f.comments.insert(f.comments.end(), t.leading_comments.begin(), t.leading_comments.end());
  }
  f.code = deparse(subprogram(p, slice));
  f.n_lines = slice.size();
  return f;
}

}  // namespace trackr
