// polyaccent/errors.hpp

// Copyright 2026  polyaccent authors
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

#ifndef POLYACCENT_ERRORS_HPP_
#define POLYACCENT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace polyaccent {

// Argument outside an operation's domain (bad rate, unknown accent, T == 0).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Tensor or frame-grid dimensions that do not line up.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two feature streams computed on the same waveform disagree on frame count.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Well-formed file whose header does not match what the reader expects.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Empty, truncated, or otherwise unreadable file.
class CorruptFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Character predictions could not be produced for a clip.
class FrontendUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A training loss term evaluated to NaN or infinity.
class NonFiniteLoss : public std::runtime_error {
 public:
  NonFiniteLoss(const std::string& term, double value)
      : std::runtime_error("non-finite loss term " + term + " = " +
                           std::to_string(value)),
        term_(term) {}
  const std::string& term() const { return term_; }

 private:
  std::string term_;
};

}  // namespace polyaccent

#endif  // POLYACCENT_ERRORS_HPP_
