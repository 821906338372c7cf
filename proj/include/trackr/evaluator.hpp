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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trackr/ast.hpp"
#include "trackr/value.hpp"

namespace trackr {

using Clock = std::function<std::chrono::system_clock::time_point()>;

/// MINSTD Lehmer generator: state' = 48271 * state mod (2^31 - 1).
class Minstd {
 public:
  static constexpr std::uint64_t kModulus = 2147483647;
  static constexpr std::uint64_t kMultiplier = 48271;

  explicit Minstd(std::uint64_t seed = 1) { seed_with(seed); }
  void seed_with(std::uint64_t seed);
  /// Advances and returns the new state, in [1, 2^31 - 2].
  std::uint64_t next();
  std::uint64_t state() const { return state_; }
  void set_state(std::uint64_t s) { state_ = s; }

 private:
  std::uint64_t state_ = 1;
};

/// Row indices of a size-`n` sample without replacement from `population`
/// rows: a partial Fisher-Yates shuffle where step i swaps position i with
/// i + (next() mod (population - i)).
std::vector<std::size_t> sample_indices(Minstd& rng, std::size_t population, std::size_t n);

struct Env {
  std::map<std::string, ArtifactValue> bindings;
  std::uint64_t rng_state = 1;
  std::set<std::string> loaded_packages;
  Clock clock = [] { return std::chrono::system_clock::now(); };
  /// Relative paths given to read_csv resolve against this directory.
  std::filesystem::path base_dir;

  const ArtifactValue* lookup(const std::string& name) const;
};

struct ExprOutcome {
  bool ok = false;
  /// Value of the expression: the bound value for assignments, Unit for
  /// library().
  std::optional<ArtifactValue> value;
  std::optional<EvalError> error;
};

struct EvalResult {
  std::vector<ExprOutcome> outcomes;
  std::size_t failures() const;
};

/// Evaluates one top-level expression. On error the environment is left
/// exactly as it was and EvalError is thrown with the expression span.
ArtifactValue eval_top(const TopExpr& e, Env& env);

ArtifactValue eval_expr(const Expr& e, Env& env);

/// Evaluates expressions in order; a failing expression is marked failed and
/// evaluation continues with the next one.
EvalResult eval_program(const Program& p, Env& env);

/// Valid `geoms` entries and their default stat, in declaration order.
const std::vector<std::pair<std::string, std::string>>& geom_default_stats();

}  // namespace trackr
