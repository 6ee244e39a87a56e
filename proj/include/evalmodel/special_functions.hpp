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

// P-value kernel for the assumption tests.

#ifndef EVALMODEL_SPECIAL_FUNCTIONS_HPP_
#define EVALMODEL_SPECIAL_FUNCTIONS_HPP_

namespace evalmodel {

// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0.
double regularized_gamma_q(double a, double x);

// Kolmogorov limiting survival function
//   Q(lambda) = 2 * sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

enum class TailKind { kStdNormal, kStudentT, kChiSquare, kKsAsymptotic };

struct TailDistribution {
  TailKind kind = TailKind::kStdNormal;
  // Degrees of freedom for kStudentT and kChiSquare.
  double df = 1.0;

  static TailDistribution std_normal() { return {TailKind::kStdNormal, 1.0}; }
  static TailDistribution student_t(double df) { return {TailKind::kStudentT, df}; }
  static TailDistribution chi_square(double df) { return {TailKind::kChiSquare, df}; }
  static TailDistribution ks_asymptotic() { return {TailKind::kKsAsymptotic, 1.0}; }
};

// StdNormal and StudentT: two-sided p. ChiSquare: upper tail. KsAsymptotic:
// kolmogorov_q(statistic). Throws InputError on a non-finite statistic and
// DomainError on df < 1.
double tail_probability(const TailDistribution& dist, double statistic);

// t such that the two-sided StudentT(df) p-value at t equals p.
double student_t_critical(double p, double df);

}  // namespace evalmodel

#endif  // EVALMODEL_SPECIAL_FUNCTIONS_HPP_
