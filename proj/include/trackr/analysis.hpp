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

#include <map>
#include <set>
#include <string>
#include <vector>

#include "trackr/ast.hpp"

namespace trackr {

/// Pseudo-symbol for the session random stream.
inline constexpr const char* kRngSymbol = "@rng";
/// Pseudo-symbol prefix for a loaded package, e.g. "@pkg:vizlib".
inline constexpr const char* kPackageSymbolPrefix = "@pkg:";

/// Def-use structure over top-level expressions. Besides ordinary
/// identifiers, `defs`/`uses` carry pseudo-symbols: `library(p)` defines
/// `@pkg:p` and every call into package p uses it; `set_seed` defines
/// `@rng`, `sample_rows` both uses and defines it.
struct DefUseGraph {
  std::map<std::string, std::vector<std::size_t>> defs;
  std::vector<std::set<std::string>> uses;
  /// edges[i] = indices expression i depends on; every j in edges[i] has j < i.
  std::vector<std::set<std::size_t>> edges;
};

DefUseGraph def_use_graph(const Program& p);

/// Indices, in source order, of the expressions producing the latest
/// definition of `target` at or before `at` (end of program by default).
/// Throws UnknownTarget.
std::vector<std::size_t> backward_slice(const Program& p, const std::string& target);
std::vector<std::size_t> backward_slice(const Program& p, const std::string& target, std::size_t at);

/// Slice rooted at the expression with index `root` itself (used for
/// displayed, unassigned values).
std::vector<std::size_t> backward_slice_from(const Program& p, std::size_t root);

struct CodeFeatures {
  std::set<std::string> input_vars;
  std::set<std::string> functions;
  std::set<std::string> string_constants;
  std::set<std::string> packages;
  std::string code;
  std::size_t n_lines = 0;
  std::vector<std::string> comments;

  friend bool operator==(const CodeFeatures&, const CodeFeatures&) = default;
};

CodeFeatures extract_code_features(const Program& p, const std::vector<std::size_t>& slice);

}  // namespace trackr
