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

#include <optional>
#include <string>
#include <string_view>

#include "trackr/ast.hpp"

namespace trackr {

/// Parses a Tracklang script into top-level expressions. Throws LexError or
/// ParseError; never anything else for any input.
Program parse_program(std::string_view source, std::optional<std::string> source_name = {});

/// Parses a single expression (no assignment).
Expr parse_expr(std::string_view source);

/// Canonical source text: `<-` for assignment, single spaces around binary
/// operators and `=`, one top-level expression per line, each line ending in
/// a newline. Comments are not emitted.
std::string deparse(const Program& p);
std::string deparse(const TopExpr& e);
std::string deparse(const Expr& e);

/// Double-quoted literal with `\"`, `\\`, `\n`, `\t`, `\r` and `\xHH` for
/// other control bytes.
std::string quote_string(std::string_view s);

/// Shortest decimal text that parses back to `v`.
std::string format_number(double v);

}  // namespace trackr
