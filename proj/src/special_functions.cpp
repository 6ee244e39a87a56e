/*
 * Copyright 2026 The evalmodel Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "evalmodel/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "evalmodel/errors.hpp"

namespace evalmodel {
namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-15;
constexpr int kMaxIterations = 10000;

// Continued fraction for the incomplete beta, modified Lentz evaluation.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
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
  throw NumericError("incomplete beta continued fraction did not converge");
}

double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw NumericError("incomplete gamma series did not converge");
}

double gamma_q_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) {
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
  }
  throw NumericError("incomplete gamma continued fraction did not converge");
}

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return clamp_probability(front * beta_continued_fraction(a, b, x) / a);
  }
  return clamp_probability(1.0 -
                           front * beta_continued_fraction(b, a, 1.0 - x) / b);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0)) throw DomainError("incomplete gamma needs a > 0");
  if (!(x >= 0.0)) throw DomainError("incomplete gamma needs x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return clamp_probability(1.0 - gamma_p_series(a, x));
  return clamp_probability(gamma_q_continued_fraction(a, x));
}

double kolmogorov_q(double lambda) {
  if (std::isnan(lambda)) throw InputError("kolmogorov_q: NaN argument");
  if (lambda <= 0.0) return 1.0;
  constexpr double kTruncate = 1e-12;
  if (lambda < 1.18) {
    // Jacobi theta form; the alternating series converges too slowly here.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double w = pi2 / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int j = 1; j < kMaxIterations; ++j) {
      const double k = 2.0 * j - 1.0;
      const double term = std::exp(-k * k * w);
      sum += term;
      if (term < kTruncate) break;
    }
    return clamp_probability(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j < kMaxIterations; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < kTruncate) break;
  }
  return clamp_probability(2.0 * sum);
}

double tail_probability(const TailDistribution& dist, double statistic) {
  if (!std::isfinite(statistic)) {
    throw InputError("tail_probability: statistic is not finite");
  }
  switch (dist.kind) {
    case TailKind::kStdNormal:
      return clamp_probability(std::erfc(std::fabs(statistic) / std::numbers::sqrt2));
    case TailKind::kStudentT: {
      if (!(dist.df >= 1.0)) throw DomainError("StudentT needs df >= 1");
      const double t2 = statistic * statistic;
      return regularized_incomplete_beta(0.5 * dist.df, 0.5, dist.df / (dist.df + t2));
    }
    case TailKind::kChiSquare:
      if (!(dist.df >= 1.0)) throw DomainError("ChiSquare needs df >= 1");
      if (statistic <= 0.0) return 1.0;
      return regularized_gamma_q(0.5 * dist.df, 0.5 * statistic);
    case TailKind::kKsAsymptotic:
      return kolmogorov_q(statistic);
  }
  throw DomainError("unknown tail distribution");
}

double student_t_critical(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("critical value needs p in (0, 1)");
  const auto dist = TailDistribution::student_t(df);
  double lo = 0.0;
  double hi = 1.0;
  while (tail_probability(dist, hi) > p) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (tail_probability(dist, mid) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace evalmodel
