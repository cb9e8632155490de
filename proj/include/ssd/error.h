// include/ssd/error.h

// Copyright 2026 The ssdscreen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SSD_ERROR_H_
#define SSD_ERROR_H_

#include <stdexcept>
#include <string>

namespace ssd {

/// Base class of every error raised by the library. The CLI maps these to
/// exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File missing, unreadable or unwritable.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Audio encoding the front-end does not accept (non-PCM, multi-channel...).
class UnsupportedEncodingError : public Error {
 public:
  using Error::Error;
};

/// Shapes of two operands disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument or a data invariant does not hold.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A test speaker reached a training stage during cross-validation.
class LeakError : public Error {
 public:
  using Error::Error;
};

}  // namespace ssd

#endif  // SSD_ERROR_H_
