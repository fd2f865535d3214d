/*
 * Copyright 2026 The georank Authors.
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

#ifndef GEORANK_ERRORS_H_
#define GEORANK_ERRORS_H_

#include <stdexcept>
#include <string>

namespace georank {

// Base class for every error raised by the library. The CLI maps the
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration or invalid arguments supplied by the caller.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed, missing or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// Tensor shapes that do not line up for an operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf values, divergence, or a math domain violation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace georank

#endif  // GEORANK_ERRORS_H_
