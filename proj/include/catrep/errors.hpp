// Copyright 2026 The catrep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CATREP_ERRORS_HPP
#define CATREP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace catrep {

/// Input outside the mathematical domain of an operation (p <= 0, T <= 0, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent caller input (bad sizes, wrong basis, unknown node).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Configuration file or schema violation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: integrator blow-up, non-convergent fit, noisy derivative.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File read/write failures and corrupt serialized data.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace catrep

#endif
