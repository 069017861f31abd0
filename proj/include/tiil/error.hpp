/* Copyright 2026 The TIIL Authors. All Rights Reserved.

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

#pragma once

#include <stdexcept>
#include <string>

namespace tiil {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violations: bad shapes, empty text, out-of-range parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A backend could not be constructed or lacks a required capability.
class BackendError : public Error {
 public:
  using Error::Error;
};

// Unreadable or malformed input files.
class DataError : public Error {
 public:
  using Error::Error;
};

// Error raised inside a named pipeline stage; keeps the original category.
class StageError : public Error {
 public:
  enum class Cause { kInvalidArgument, kBackend, kData, kOther };

  StageError(std::string stage, Cause cause, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)), cause_(cause) {}

  const std::string& stage() const noexcept { return stage_; }
  Cause cause() const noexcept { return cause_; }

 private:
  std::string stage_;
  Cause cause_;
};

}  // namespace tiil
