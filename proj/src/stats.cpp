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

#include "trackr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trackr/error.hpp"
#include "trackr/lexer.hpp"

namespace trackr::stats {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (std::isnan(x) || a <= 0 || b <= 0) return kNaN;
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double two_sided_p(double t, double df) {
  if (std::isnan(t) || !(df > 0)) return kNaN;
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return incomplete_beta(df / 2.0, 0.5, x);
}

double student_t_cdf(double t, double df) {
  const double tail = two_sided_p(t, df) / 2.0;
  if (std::isnan(tail)) return kNaN;
  return t >= 0 ? 1.0 - tail : tail;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return kNaN;
  const std::size_t n = xs.size();
  auto mid = xs.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(xs.begin(), mid, xs.end());
  double hi = *mid;
  if (n % 2 == 1) return hi;
  double lo = *std::max_element(xs.begin(), mid);
  return (lo + hi) / 2.0;
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return kNaN;
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

Formula parse_formula(const std::string& text) {
  auto fail = [&](const std::string& why) -> Formula {
    throw EvalError(EvalErrorKind::FormulaError, "bad formula '" + text + "': " + why);
  };
  auto tilde = text.find('~');
  if (tilde == std::string::npos) return fail("missing '~'");
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  Formula f;
  f.response = trim(text.substr(0, tilde));
  if (!is_identifier(f.response)) return fail("response must be a column name");
  std::string rhs = text.substr(tilde + 1);
  if (trim(rhs).empty()) return fail("empty right-hand side");
  std::size_t start = 0;
  while (true) {
    auto plus = rhs.find('+', start);
    std::string term = trim(rhs.substr(start, plus == std::string::npos ? std::string::npos
                                                                        : plus - start));
    if (term.empty()) return fail("empty term");
    if (term != "1") {
      if (!is_identifier(term)) return fail("unsupported term '" + term + "'");
      if (std::find(f.terms.begin(), f.terms.end(), term) != f.terms.end()) {
        return fail("duplicate term '" + term + "'");
      }
      f.terms.push_back(term);
    }
    if (plus == std::string::npos) break;
    start = plus + 1;
  }
  return f;
}

OlsFit ols(const std::vector<double>& design, std::size_t p, const std::vector<double>& y) {
  const std::size_t n = y.size();
  if (p == 0 || design.size() != n * p) {
    throw EvalError(EvalErrorKind::TypeError, "design matrix shape mismatch");
  }

  // Normal equations X'X b = X'y, augmented with the identity so the same
  // elimination yields (X'X)^-1 for the standard errors.
  const std::size_t w = 2 * p + 1;
  std::vector<double> m(p * w, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = &design[r * p];
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) m[i * w + j] += row[i] * row[j];
      m[i * w + p] += row[i] * y[r];
    }
  }
  double max_diag = 0;
  for (std::size_t i = 0; i < p; ++i) {
    max_diag = std::max(max_diag, std::fabs(m[i * w + i]));
    m[i * w + p + 1 + i] = 1.0;
  }
  const double threshold = kSingularPivotRatio * max_diag;

  // Gauss-Jordan without pivoting: X'X is symmetric positive semi-definite.
  for (std::size_t k = 0; k < p; ++k) {
    const double pivot = m[k * w + k];
    if (!(pivot > threshold)) {
      throw EvalError(EvalErrorKind::SingularDesign,
                      "design matrix is rank deficient (pivot " + std::to_string(k) + ")");
    }
    for (std::size_t j = 0; j < w; ++j) m[k * w + j] /= pivot;
    for (std::size_t i = 0; i < p; ++i) {
      if (i == k) continue;
      const double f = m[i * w + k];
      if (f == 0) continue;
      for (std::size_t j = 0; j < w; ++j) m[i * w + j] -= f * m[k * w + j];
    }
  }

  OlsFit fit;
  fit.nobs = n;
  fit.df_residual = n > p ? n - p : 0;
  fit.coefficients.resize(p);
  for (std::size_t i = 0; i < p; ++i) fit.coefficients[i] = m[i * w + p];

  for (std::size_t r = 0; r < n; ++r) {
    double pred = 0;
    for (std::size_t j = 0; j < p; ++j) pred += design[r * p + j] * fit.coefficients[j];
    const double e = y[r] - pred;
    fit.rss += e * e;
  }

  const double sigma2 =
      fit.df_residual > 0 ? fit.rss / static_cast<double>(fit.df_residual) : kNaN;
  const double df = static_cast<double>(fit.df_residual);
  for (std::size_t i = 0; i < p; ++i) {
    const double se = std::sqrt(sigma2 * m[i * w + p + 1 + i]);
    const double t = fit.coefficients[i] / se;
    fit.std_errors.push_back(se);
    fit.t_stats.push_back(t);
    fit.p_values.push_back(two_sided_p(t, df));
  }
  return fit;
}

}  // namespace trackr::stats
