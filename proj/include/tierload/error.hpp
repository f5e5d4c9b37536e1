// Copyright 2026 The tierload Authors. All Rights Reserved.
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

namespace tierload {

// Base of every error the library raises on bad input or bad files.
// Programming errors (protocol misuse) use ProtocolError instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid numeric parameter or configuration value.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// The file system refused an open/read/write.
class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class BadMagicError : public FormatError {
 public:
  using FormatError::FormatError;
};

class TruncatedFileError : public FormatError {
 public:
  using FormatError::FormatError;
};

class VersionMismatchError : public FormatError {
 public:
  using FormatError::FormatError;
};

// The file parsed but its contents violate a structural invariant.
class CorruptDataError : public FormatError {
 public:
  using FormatError::FormatError;
};

// A configuration that is individually valid but cannot run, e.g. a feature
// row that does not fit one cache line.
class InfeasibleConfigError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace tierload
