/* Copyright 2026 The retab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef RETAB_ERROR_HPP_
#define RETAB_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace retab {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or violated precondition (shape mismatch, bad threshold,
// out-of-range category, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Malformed NPY container or payload.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Well-formed container holding a dtype outside {<f4, |u1, <i4}.
class UnsupportedTypeError : public FormatError {
 public:
  using FormatError::FormatError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A metric whose value is undefined for the given input (e.g. mIoU with
// every category absent).
class UndefinedResultError : public Error {
 public:
  using Error::Error;
};

}  // namespace retab

#endif  // RETAB_ERROR_HPP_
