// Copyright 2026 The bayesfblin Authors
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

#ifndef BAYESFBLIN_ERRORS_HPP
#define BAYESFBLIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bayesfblin {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class OptimizationError : public Error {
 public:
  using Error::Error;
};

// A b-probe produced an estimate that cannot enter log space.
class InvalidObservation : public Error {
 public:
  using Error::Error;
};

class WindowError : public Error {
 public:
  using Error::Error;
};

class ConditioningError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double time_reached)
      : Error(what), time_reached_(time_reached) {}

  // Local time (from the start of the hold interval) the solver got to.
  double time_reached() const { return time_reached_; }

 private:
  double time_reached_;
};

}  // namespace bayesfblin

#endif  // BAYESFBLIN_ERRORS_HPP
