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

#include "evalmodel/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evalmodel/errors.hpp"

namespace evalmodel {
namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0 && sigma <= 1.0)) {
    throw DomainError("sigma must lie in (0, 1], got " + std::to_string(sigma));
  }
}

std::vector<std::string> assumption_warnings(const ErrorMeasurements& errors,
                                             bool need_iris) {
  std::vector<std::string> warnings;
  if (!errors.provenance().iide_claimed) warnings.emplace_back("iide_not_claimed");
  if (need_iris && !errors.provenance().iris_claimed) {
    warnings.emplace_back("iris_not_claimed");
  }
  return warnings;
}

}  // namespace

ErrorMeasurements::ErrorMeasurements(std::vector<double> losses,
                                     MeasurementProvenance provenance,
                                     std::vector<double> signed_residuals)
    : losses_(std::move(losses)),
      signed_residuals_(std::move(signed_residuals)),
      provenance_(provenance) {
  for (std::size_t i = 0; i < losses_.size(); ++i) {
    const double l = losses_[i];
    if (!std::isfinite(l) || l < 0.0 || l > 1.0) {
      throw InputError("loss #" + std::to_string(i) + " = " + std::to_string(l) +
                       " is outside [0, 1]; normalize errors first");
    }
  }
  if (!signed_residuals_.empty() && signed_residuals_.size() != losses_.size()) {
    throw InputError("signed_residuals must parallel losses");
  }
}

double ErrorMeasurements::mean_loss() const {
  if (losses_.empty()) throw InputError("no error measurements");
  return std::accumulate(losses_.begin(), losses_.end(), 0.0) /
         static_cast<double>(losses_.size());
}

const char* to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::kGeneralization:
      return "generalization";
    case BoundKind::kCausalPositivity:
      return "causal_positivity";
    case BoundKind::kCausalNonPositivity:
      return "causal_nonpositivity";
  }
  return "unknown";
}

nlohmann::json to_json(const BoundReport& report) {
  nlohmann::json j = {{"kind", to_string(report.kind)},
                      {"e_emp", report.e_emp},
                      {"n", report.n},
                      {"sigma", report.sigma},
                      {"epsilon", report.epsilon},
                      {"bound", report.bound},
                      {"warnings", report.warnings}};
  if (report.kind == BoundKind::kCausalPositivity) {
    j["n_a"] = report.n_a;
    j["n_b"] = report.n_b;
  }
  return j;
}

double epsilon(std::size_t n, double sigma) {
  check_sigma(sigma);
  if (n == 0) throw DomainError("epsilon needs n >= 1");
  return std::sqrt(std::log(1.0 / sigma) / (2.0 * static_cast<double>(n)));
}

double epsilon_two_arm(std::size_t n, double sigma) {
  check_sigma(sigma);
  if (n == 0) throw DomainError("epsilon needs n >= 1");
  return std::sqrt(std::log(2.0 / sigma) / (2.0 * static_cast<double>(n)));
}

BoundReport generalization_bound(const ErrorMeasurements& errors,
                                 double sigma) {
  if (errors.n() == 0) throw InputError("generalization bound needs losses");
  BoundReport r;
  r.kind = BoundKind::kGeneralization;
  r.e_emp = errors.mean_loss();
  r.n = errors.n();
  r.sigma = sigma;
  r.epsilon = epsilon(r.n, sigma);
  r.bound = r.e_emp + r.epsilon;
  r.warnings = assumption_warnings(errors, false);
  return r;
}

BoundReport causal_bound_nonpositivity(const ErrorMeasurements& errors,
                                       double sigma) {
  BoundReport r = generalization_bound(errors, sigma);
  r.kind = BoundKind::kCausalNonPositivity;
  r.bound = 2.0 * (r.e_emp + r.epsilon);
  r.warnings = assumption_warnings(errors, true);
  return r;
}

BoundReport causal_bound_positivity(const ErrorMeasurements& errors_a,
                                    const ErrorMeasurements& errors_b,
                                    double sigma) {
  if (errors_a.n() == 0 || errors_b.n() == 0) {
    throw InputError("positivity bound needs both arms non-empty");
  }
  BoundReport r;
  r.kind = BoundKind::kCausalPositivity;
  r.sigma = sigma;
  r.n_a = errors_a.n();
  r.n_b = errors_b.n();
  r.n = r.n_a + r.n_b;
  const double ea = errors_a.mean_loss();
  const double eb = errors_b.mean_loss();
  const double term_a = ea + epsilon_two_arm(r.n_a, sigma);
  const double term_b = eb + epsilon_two_arm(r.n_b, sigma);
  // Report the binding arm.
  if (term_a >= term_b) {
    r.e_emp = ea;
    r.epsilon = term_a - ea;
  } else {
    r.e_emp = eb;
    r.epsilon = term_b - eb;
  }
  r.bound = 2.0 * std::max(term_a, term_b);
  r.warnings = assumption_warnings(errors_a, true);
  for (auto& w : assumption_warnings(errors_b, true)) {
    if (std::find(r.warnings.begin(), r.warnings.end(), w) == r.warnings.end()) {
      r.warnings.push_back(w);
    }
  }
  return r;
}

std::uint64_t required_n(double target_epsilon, double sigma) {
  check_sigma(sigma);
  if (!(target_epsilon > 0.0) || !std::isfinite(target_epsilon)) {
    throw DomainError("target epsilon must be positive and finite");
  }
  const double raw =
      std::ceil(std::log(1.0 / sigma) / (2.0 * target_epsilon * target_epsilon));
  auto n = static_cast<std::uint64_t>(std::max(1.0, raw));
  // Guard against rounding in the closed-form inversion.
  while (n > 1 && epsilon(n - 1, sigma) <= target_epsilon) --n;
  while (epsilon(n, sigma) > target_epsilon) ++n;
  return n;
}

}  // namespace evalmodel
