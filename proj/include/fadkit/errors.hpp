// Copyright 2026 The fadkit Authors. All Rights Reserved.
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

#ifndef FADKIT_ERRORS_HPP_
#define FADKIT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace fadkit {

// Error classes map one-to-one onto CLI exit codes (2, 3, 4).
enum class ErrorKind { kConfig, kData, kNumerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kConfig, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

// Bad magic or version in a binary file.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

// Payload shorter than the header promises.
class LengthError : public DataError {
 public:
  using DataError::DataError;
};

// NaN or Inf where finite values are required.
class NonFiniteError : public DataError {
 public:
  using DataError::DataError;
};

class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

class IndefiniteMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UndefinedResultError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace fadkit

#endif  // FADKIT_ERRORS_HPP_
