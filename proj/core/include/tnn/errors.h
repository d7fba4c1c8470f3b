// Copyright 2026 The TNN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TNN_ERRORS_H_
#define TNN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace tnn {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes or lengths that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Overflow, NaN or another non-finite intermediate.
class NumericError : public Error {
 public:
  using Error::Error;
};

// An index or offset outside its valid range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Malformed, truncated or checksum-mismatched persisted data.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration document or option value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unreadable or otherwise unusable input files.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace tnn

#endif  // TNN_ERRORS_H_
