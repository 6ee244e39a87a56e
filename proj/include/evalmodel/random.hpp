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

#ifndef EVALMODEL_RANDOM_HPP_
#define EVALMODEL_RANDOM_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace evalmodel {

// Mixes a 64-bit value (SplitMix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

// Derives an independent child seed from (seed, key). Used to fork streams
// so that work item `key` sees the same randomness regardless of the order
// in which items are scheduled.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key);

// Deterministic random stream. The engine is mt19937_64; the distributions
// are implemented here rather than taken from <random> so the sequence does
// not depend on the standard library vendor.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  RandomStream fork(std::uint64_t key) const {
    return RandomStream(derive_seed(seed_, key));
  }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1).
  double uniform();
  // Uniform integer in [lo, hi] (inclusive).
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  double normal(double mean = 0.0, double stddev = 1.0);
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, i - 1));
      std::swap(values[i - 1], values[j]);
    }
  }

  // 0..n-1 in random order.
  std::vector<std::size_t> permutation(std::size_t n);
  // k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k);
  // k indices from [0, n) drawn with replacement.
  std::vector<std::size_t> sample_with_replacement(std::size_t n,
                                                   std::size_t k);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace evalmodel

#endif  // EVALMODEL_RANDOM_HPP_
