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

#include <cstddef>
#include <string>
#include <vector>

namespace trackr::stats {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// CDF of Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

/// P(|T| >= |t|). NaN for NaN input or df <= 0.
double two_sided_p(double t, double df);

double median(std::vector<double> xs);
double mean(const std::vector<double>& xs);

/// Parsed `response ~ term1 + term2`; an intercept is always included and
/// a literal `1` term is accepted and ignored.
struct Formula {
  std::string response;
  std::vector<std::string> terms;
};

/// Throws EvalError(FormulaError).
Formula parse_formula(const std::string& text);

struct OlsFit {
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> t_stats;
  std::vector<double> p_values;
  double rss = 0;
  std::size_t nobs = 0;
  std::size_t df_residual = 0;
};

/// Ordinary least squares via the normal equations. `design` is row-major
/// with `p` columns (intercept column included by the caller). Throws
/// EvalError(SingularDesign) when an elimination pivot drops below
/// 1e-10 times the largest diagonal entry of X'X.
OlsFit ols(const std::vector<double>& design, std::size_t p, const std::vector<double>& y);

inline constexpr double kSingularPivotRatio = 1e-10;

}  // namespace trackr::stats
