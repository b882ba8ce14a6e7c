/*
 Copyright 2026 The tankds Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace tankds {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its documented domain (e.g. lo >= hi, r < 0).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A model was used before being fitted or loaded.
class NotFitted : public Error {
 public:
  using Error::Error;
};

/// Covariance or Gram matrix lost positive definiteness.
class SingularModel : public Error {
 public:
  using Error::Error;
};

/// A regression backend produced a non-finite value.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Integration produced a non-finite state. The stabilized system cannot
/// diverge, so this always signals a bug.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long step)
      : Error(what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace tankds
