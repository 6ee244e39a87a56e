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

#include <cmath>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "evalmodel/bounds.hpp"
#include "evalmodel/errors.hpp"
#include "evalmodel/random.hpp"

namespace evalmodel {
namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

// Epsilon in 50-digit arithmetic, independent of the library's doubles.
double big_epsilon(double n, double sigma, double numerator = 1.0) {
  const Big v = boost::multiprecision::sqrt(boost::multiprecision::log(Big(numerator) / Big(sigma)) /
                                            (Big(2) * Big(n)));
  return static_cast<double>(v);
}

TEST(Epsilon, TableValues) {
  EXPECT_NEAR(epsilon(10, 0.05), 0.387, 0.001);
  EXPECT_NEAR(epsilon(1000, 0.001), 0.0588, 0.0001);
  EXPECT_NEAR(epsilon(1000000000, 0.5), 0.0000186, 0.00000005);
  EXPECT_EQ(epsilon(50, 1.0), 0.0);
}

TEST(Epsilon, MatchesHighPrecisionOracle) {
  for (double n : {1.0, 7.0, 10.0, 123.0, 1e4, 1e9}) {
    for (double s : {0.5, 0.05, 0.01, 0.001, 1e-9}) {
      const double want = big_epsilon(n, s);
      EXPECT_NEAR(epsilon(static_cast<std::size_t>(n), s), want, 1e-15 * want + 1e-300);
      EXPECT_NEAR(epsilon_two_arm(static_cast<std::size_t>(n), s), big_epsilon(n, s, 2.0), 1e-14);
    }
  }
}

TEST(Epsilon, RejectsBadArguments) {
  EXPECT_THROW(epsilon(10, 0.0), DomainError);
  EXPECT_THROW(epsilon(10, 1.5), DomainError);
  EXPECT_THROW(epsilon(10, -0.1), DomainError);
  EXPECT_THROW(epsilon(0, 0.5), DomainError);
}

TEST(Epsilon, DecreasesInNAndSigma) {
  for (std::size_t n = 1; n < 200; ++n) EXPECT_GT(epsilon(n, 0.05), epsilon(n + 1, 0.05));
  for (double s = 0.001; s < 0.99; s += 0.01) EXPECT_GT(epsilon(40, s), epsilon(40, s + 0.01));
}

TEST(GeneralizationBound, ZeroLosses) {
  const ErrorMeasurements errs(std::vector<double>(100, 0.0));
  const auto r = generalization_bound(errs, 0.05);
  EXPECT_NEAR(r.bound, 0.122, 0.001);
  EXPECT_EQ(r.e_emp, 0.0);
  EXPECT_EQ(r.n, 100u);
}

TEST(GeneralizationBound, EmpiricalErrorShiftsBound) {
  const ErrorMeasurements errs(std::vector<double>(20, 0.3));
  EXPECT_NEAR(generalization_bound(errs, 0.5).bound, 0.432, 0.001);
}

TEST(GeneralizationBound, WarnsWithoutClaims) {
  const ErrorMeasurements errs(std::vector<double>(20, 0.3));
  const auto r = generalization_bound(errs, 0.5);
  EXPECT_FALSE(r.warnings.empty());
  MeasurementProvenance prov;
  prov.iide_claimed = true;
  prov.iris_claimed = true;
  const auto clean = generalization_bound(ErrorMeasurements({0.1, 0.2}, prov), 0.5);
  EXPECT_TRUE(clean.warnings.empty());
}

TEST(ErrorMeasurementsTest, ValidatesLosses) {
  EXPECT_THROW(ErrorMeasurements({0.1, 1.2}), InputError);
  EXPECT_THROW(ErrorMeasurements({-0.1}), InputError);
  EXPECT_THROW(ErrorMeasurements({NAN}), InputError);
  EXPECT_THROW(ErrorMeasurements({0.1, 0.2}, {}, {1.0}), InputError);
  EXPECT_THROW(generalization_bound(ErrorMeasurements(), 0.5), InputError);
}

TEST(CausalBounds, NonPositivityIsTwiceGeneralization) {
  RandomStream rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> losses(1 + rng.uniform_int(0, 300));
    for (auto& l : losses) l = rng.uniform();
    const ErrorMeasurements errs(losses);
    const double s = 0.001 + 0.998 * rng.uniform();
    EXPECT_EQ(causal_bound_nonpositivity(errs, s).bound, 2.0 * generalization_bound(errs, s).bound);
  }
  EXPECT_NEAR(causal_bound_nonpositivity(ErrorMeasurements(std::vector<double>(100, 0.0)), 0.05).bound,
              0.245, 0.001);
  EXPECT_NEAR(causal_bound_nonpositivity(ErrorMeasurements(std::vector<double>(10, 0.0)), 0.5).bound,
              0.372, 0.001);
}

TEST(CausalBounds, PositivityFormula) {
  const ErrorMeasurements a(std::vector<double>(1000, 0.0));
  EXPECT_NEAR(causal_bound_positivity(a, a, 0.05).bound, 0.0859, 0.0005);
  EXPECT_NEAR(causal_bound_positivity(a, a, 0.05).bound, 0.08589388166934751, 1e-12);

  const ErrorMeasurements sym(std::vector<double>(50, 0.2));
  EXPECT_NEAR(causal_bound_positivity(sym, sym, 0.1).bound,
              2.0 * (0.2 + std::sqrt(std::log(2.0 / 0.1) / 100.0)), 1e-12);
}

TEST(CausalBounds, PositivityUsesBindingArm) {
  const ErrorMeasurements a(std::vector<double>(30, 0.4));
  const ErrorMeasurements b_small(std::vector<double>(100, 0.1));
  const ErrorMeasurements b_large(std::vector<double>(10000, 0.1));
  const double b1 = causal_bound_positivity(a, b_small, 0.05).bound;
  const double b2 = causal_bound_positivity(a, b_large, 0.05).bound;
  EXPECT_EQ(b1, b2);
  EXPECT_THROW(causal_bound_positivity(a, ErrorMeasurements(), 0.05), InputError);
}

TEST(RequiredN, InvertsEpsilon) {
  // 0.387 is the rounded table entry; epsilon(10, 0.05) = 0.38701 > 0.387.
  EXPECT_EQ(required_n(0.387, 0.05), 11u);
  EXPECT_EQ(required_n(0.3871, 0.05), 10u);
  const auto n = required_n(0.0588, 0.001);
  EXPECT_GE(n, 999u);
  EXPECT_LE(n, 1001u);
  for (double target : {0.5, 0.1, 0.01, 0.0031}) {
    for (double s : {0.5, 0.05, 0.001}) {
      const auto k = required_n(target, s);
      EXPECT_LE(epsilon(k, s), target);
      if (k > 1) {
        EXPECT_GT(epsilon(k - 1, s), target);
      }
    }
  }
}

}  // namespace
}  // namespace evalmodel
