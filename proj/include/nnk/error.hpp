// Copyright 2026 The nnkgraph Authors.
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

#ifndef NNK_ERROR_HPP
#define NNK_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nnk {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problems with input data: unreadable files, malformed content, shapes.
class DataError : public Error {
 public:
  using Error::Error;
};

class IOError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class MismatchError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientSamples : public DataError {
 public:
  using DataError::DataError;
};

class DimensionMismatch : public DataError {
 public:
  using DataError::DataError;
};

/// A point coincides with the center of a local construction where the
/// construction needs a nonzero difference vector.
class DegenerateInput : public DataError {
 public:
  using DataError::DataError;
};

class NoLabels : public DataError {
 public:
  using DataError::DataError;
};

/// Caller-supplied parameters out of range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidK : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class InvalidKernelValue : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class SizeLimit : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Numerical failures inside the solvers.
class SolverError : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public SolverError {
 public:
  using SolverError::SolverError;
};

class NonConvergence : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace nnk

#endif  // NNK_ERROR_HPP
