// Copyright 2026 The Concet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONCET_ERROR_HPP_
#define CONCET_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace concet {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the offending location when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, int line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what),
        file_(file),
        line_(line) {}
  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

// Semantically invalid data (bad record, unknown label, shape mismatch in
// external inputs). Maps to exit code 2 in the CLI.
class DataError : public Error {
 public:
  using Error::Error;
};

// A mention was never observed in the corpus; callers decide the fallback.
class NoOccurrenceError : public Error {
 public:
  using Error::Error;
};

// A template slot whose candidate pool holds no values.
class EmptyPoolError : public DataError {
 public:
  using DataError::DataError;
};

// Container or file format version is not the one this build understands.
class VersionError : public Error {
 public:
  using Error::Error;
};

// Tensor/layer shape mismatch inside the network.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Bad command line. Maps to exit code 1 in the CLI.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace concet

#endif  // CONCET_ERROR_HPP_
