// Copyright 2026 The qmpso Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace qmpso {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor extents that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf input or a numerical routine that failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Arguments outside their documented domain.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The request is valid but exceeds what the chosen backend can do exactly
/// (dense limits, bond budgets).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Malformed interchange document.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Filesystem or stream failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qmpso
