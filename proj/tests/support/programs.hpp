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

// Random well-typed Tracklang programs over the small.csv fixture.

#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "trackr/analysis.hpp"
#include "trackr/parser.hpp"

namespace trackr::testing {

struct GeneratedProgram {
  std::string source;
  std::string target;
};

class ProgramGenerator {
 public:
  explicit ProgramGenerator(std::uint32_t seed) : rng_(seed) {}

  GeneratedProgram next(std::size_t max_exprs = 30) {
    vars_.clear();
    lines_.clear();
    vizlib_ = false;
    limit_ = pick(2, max_exprs);
    while (lines_.size() < limit_) step();
    std::vector<std::string> names;
    for (const auto& [name, v] : vars_) names.push_back(name);
    if (names.empty()) {
      lines_.push_back("v0 <- 1");
      names.push_back("v0");
    }
    std::string src;
    for (const auto& l : lines_) src += l + "\n";
    if (coin(0.5)) return {src, names[pick(0, names.size() - 1)]};
    // Otherwise the variable with the deepest slice.
    Program p = parse_program(src);
    std::string best = names.front();
    std::size_t depth = 0;
    for (const auto& name : names) {
      std::size_t d = backward_slice(p, name).size();
      if (d > depth) {
        depth = d;
        best = name;
      }
    }
    return {src, best};
  }

 private:
  enum class Kind { Num, Table, Plot, Model, Vec };
  struct Var {
    Kind kind;
    std::size_t nrow = 0;
    bool has_g = true;
  };

  std::size_t pick(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::string fresh_or_reused() {
    static const char* kNames[] = {"v1", "v2", "v3", "v4", "v5", "v6", "v7", "dat", "total", "fit"};
    return kNames[pick(0, std::size(kNames) - 1)];
  }

  std::vector<std::string> of_kind(Kind k, std::size_t min_rows = 0) const {
    std::vector<std::string> out;
    for (const auto& [name, v] : vars_) {
      if (v.kind == k && v.nrow >= min_rows) out.push_back(name);
    }
    return out;
  }

  std::string any_of(const std::vector<std::string>& xs) { return xs[pick(0, xs.size() - 1)]; }

  std::string number() {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", static_cast<double>(pick(1, 999)) / 10.0);
    return buf;
  }

  void assign(const std::string& expr, Var v) {
    std::string name = fresh_or_reused();
    lines_.push_back(name + " <- " + expr);
    vars_[name] = v;
  }

  void step() {
    auto tables = of_kind(Kind::Table);
    auto big = of_kind(Kind::Table, 5);
    auto nums = of_kind(Kind::Num);
    auto plots = of_kind(Kind::Plot);
    auto models = of_kind(Kind::Model);
    auto vecs = of_kind(Kind::Vec);
    switch (pick(0, 15)) {
      case 0: lines_.push_back("set_seed(" + std::to_string(pick(2, 5000)) + ")"); return;
      case 1: assign("read_csv(\"small.csv\")", {Kind::Table, 40}); return;
      case 2: {
        std::string a, b, c, g;
        for (int i = 0; i < 8; ++i) {
          const char* sep = i ? ", " : "";
          a += sep + number();
          b += sep + number();
          c += sep + number();
          g += std::string(sep) + (coin(0.5) ? "\"u\"" : "\"w\"");
        }
        assign("data_frame(a = [" + a + "], b = [" + b + "], c = [" + c + "], g = [" + g + "])",
               {Kind::Table, 8});
        return;
      }
      case 3:
      case 4:
        if (!big.empty()) {
          std::string t = any_of(big);
          std::size_t n = pick(5, vars_[t].nrow);
          if (coin(0.25)) {
            lines_.push_back("sample_rows(" + t + ", " + std::to_string(n) + ")");
          } else {
            assign("sample_rows(" + t + ", " + std::to_string(n) + ")", {Kind::Table, n});
          }
          return;
        }
        break;
      case 5:
        if (!big.empty()) {
          std::string t = any_of(big);
          std::size_t n = pick(5, vars_[t].nrow);
          assign("head(" + t + ", " + std::to_string(n) + ")", {Kind::Table, n});
          return;
        }
        break;
      case 6:
        if (!tables.empty()) {
          assign("nrow(" + any_of(tables) + ")", {Kind::Num});
          return;
        }
        break;
      case 7:
        if (!tables.empty()) {
          static const char* kCols[] = {"\"a\"", "\"b\"", "\"c\""};
          assign("mean(" + any_of(tables) + "[" + kCols[pick(0, 2)] + "])", {Kind::Num});
          return;
        }
        break;
      case 8:
        if (!nums.empty()) {
          static const char kOps[] = {'+', '-', '*'};
          std::string lhs = any_of(nums);
          std::string rhs = coin(0.5) && nums.size() > 1 ? any_of(nums) : number();
          assign(lhs + " " + kOps[pick(0, 2)] + " " + rhs + " + " + number(), {Kind::Num});
          return;
        }
        break;
      case 9: assign(number(), {Kind::Num}); return;
      case 10:
        if (!big.empty()) {
          static const char* kFormulas[] = {"b ~ a", "a ~ b + c", "c ~ a"};
          assign("fit_lm(\"" + std::string(kFormulas[pick(0, 2)]) + "\", " + any_of(big) + ")",
                 {Kind::Model});
          return;
        }
        break;
      case 11:
        if (!tables.empty() && (vizlib_ || lines_.size() + 2 <= limit_)) {
          if (!vizlib_) {
            lines_.push_back("library(vizlib)");
            vizlib_ = true;
          }
          static const char* kGeoms[] = {"[\"point\"]", "[\"point\", \"smooth\"]", "[\"line\"]",
                                         "[\"histogram\"]"};
          std::string t = any_of(tables);
          std::string color = vars_[t].has_g && coin(0.5) ? ", color = \"g\"" : "";
          assign("plot_spec(data = " + t + ", x = \"a\", y = \"b\"" + color +
                     ", geoms = " + kGeoms[pick(0, 3)] + ")",
                 {Kind::Plot});
          return;
        }
        break;
      case 12:
        if (!models.empty()) {
          assign(any_of(models) + "[\"coefficients\"]", {Kind::Vec});
          return;
        }
        break;
      case 13:
        if (!vecs.empty()) {
          assign(any_of(vecs) + "[" + std::to_string(pick(1, 2)) + "]", {Kind::Num});
          return;
        }
        break;
      case 14:
        if (!plots.empty()) {
          std::string p = any_of(plots);
          // Row counts are not tracked through plots.
          assign(p + "[\"data\"]", {Kind::Table, 0, false});
          return;
        }
        break;
      case 15:
        if (!vars_.empty()) {
          std::vector<std::string> names;
          for (const auto& [name, v] : vars_) names.push_back(name);
          auto summarizable = tables;
          summarizable.insert(summarizable.end(), models.begin(), models.end());
          if (coin(0.5) && !summarizable.empty()) {
            lines_.push_back("summary(" + any_of(summarizable) + ")");
          } else {
            lines_.push_back(any_of(names));
          }
          return;
        }
        break;
    }
    if (tables.empty()) {
      assign("read_csv(\"small.csv\")", {Kind::Table, 40});
    } else {
      std::string t = any_of(tables);
      std::size_t n = vars_[t].nrow;
      if (n >= 5) {
        std::size_t k = pick(5, n);
        assign("sample_rows(" + t + ", " + std::to_string(k) + ")", {Kind::Table, k});
      } else {
        assign("summary(" + t + ")", {Kind::Table, 4, false});
      }
    }
  }

  std::mt19937 rng_;
  std::map<std::string, Var> vars_;
  std::vector<std::string> lines_;
  bool vizlib_ = false;
  std::size_t limit_ = 0;
};

}  // namespace trackr::testing
