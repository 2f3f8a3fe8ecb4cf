// Copyright 2026 The OSNIP Lab Authors
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

#ifndef OSNIP_DIFFMATH_ERRORS_H_
#define OSNIP_DIFFMATH_ERRORS_H_

#include <stdexcept>
#include <string>

namespace osnip {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration values, unknown keys, violated preconditions on knobs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Shape mismatches and other caller contract violations.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf, undefined directions, divergence.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Structural misuse of the differentiation tape.
class GraphError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CorruptHeaderError : public IoError {
 public:
  using IoError::IoError;
};

class TruncatedError : public IoError {
 public:
  using IoError::IoError;
};

class VersionMismatchError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace osnip

#endif  // OSNIP_DIFFMATH_ERRORS_H_
