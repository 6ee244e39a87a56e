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

// Closed-form Hoeffding certificates for evaluation models.
//
// All losses are expected on [0, 1]. Regression-scale errors must be
// normalized by the caller (see ErrorMeasurements::normalized_by) before they
// reach this module.

#ifndef EVALMODEL_BOUNDS_HPP_
#define EVALMODEL_BOUNDS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace evalmodel {

struct MeasurementProvenance {
  // Errors were collected as independent, identically distributed draws.
  bool iide_claimed = false;
  // Subjects were independently, randomly, identically sampled.
  bool iris_claimed = false;
  // Scale the raw errors were divided by, when the caller normalized them.
  std::optional<double> normalized_by;
};

class ErrorMeasurements {
 public:
  ErrorMeasurements() = default;
  // Throws InputError if any loss is outside [0, 1] or non-finite, or if
  // signed_residuals is non-empty with a different length.
  explicit ErrorMeasurements(std::vector<double> losses,
                             MeasurementProvenance provenance = {},
                             std::vector<double> signed_residuals = {});

  const std::vector<double>& losses() const { return losses_; }
  const std::vector<double>& signed_residuals() const {
    return signed_residuals_;
  }
  const MeasurementProvenance& provenance() const { return provenance_; }
  std::size_t n() const { return losses_.size(); }
  double mean_loss() const;

 private:
  std::vector<double> losses_;
  std::vector<double> signed_residuals_;
  MeasurementProvenance provenance_;
};

enum class BoundKind { kGeneralization, kCausalPositivity, kCausalNonPositivity };

const char* to_string(BoundKind kind);

struct BoundReport {
  BoundKind kind = BoundKind::kGeneralization;
  double e_emp = 0.0;
  std::size_t n = 0;
  // Arm sizes, only for kCausalPositivity.
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  double sigma = 0.0;
  double epsilon = 0.0;
  double bound = 0.0;
  // Machine-readable warnings, e.g. "iide_not_claimed".
  std::vector<std::string> warnings;
};

nlohmann::json to_json(const BoundReport& report);

// sqrt(ln(1/sigma) / (2n)). Throws DomainError unless sigma in (0, 1] and
// n >= 1.
double epsilon(std::size_t n, double sigma);

// Two-sided per-arm variant used by the positivity bound: sqrt(ln(2/sigma)/(2n)).
double epsilon_two_arm(std::size_t n, double sigma);

BoundReport generalization_bound(const ErrorMeasurements& errors, double sigma);

BoundReport causal_bound_nonpositivity(const ErrorMeasurements& errors,
                                       double sigma);

BoundReport causal_bound_positivity(const ErrorMeasurements& errors_a,
                                    const ErrorMeasurements& errors_b,
                                    double sigma);

// Smallest n with epsilon(n, sigma) <= target_epsilon.
std::uint64_t required_n(double target_epsilon, double sigma);

}  // namespace evalmodel

#endif  // EVALMODEL_BOUNDS_HPP_
