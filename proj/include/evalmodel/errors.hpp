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

#ifndef EVALMODEL_ERRORS_HPP_
#define EVALMODEL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace evalmodel {

// Root of every error raised by the library. Callers that only need to
// distinguish configuration problems (exit code 2) from everything else
// (exit code 3) can catch ConfigError and then Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

// A statistic or metric is undefined on the supplied data (single class,
// zero variance, empty set, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class EncodingError : public Error {
 public:
  using Error::Error;
};

class RoutingError : public Error {
 public:
  using Error::Error;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

// CSV / errors-file ingestion failure; the message carries row and column.
class IngestionError : public Error {
 public:
  using Error::Error;
};

}  // namespace evalmodel

#endif  // EVALMODEL_ERRORS_HPP_
