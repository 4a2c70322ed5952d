// Copyright 2026 The heapfacts Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HEAPFACTS_ERRORS_H_
#define HEAPFACTS_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace heapfacts {

// Fatal conditions are exceptions; everything recoverable is collected as a
// warning on the value being built.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HeaderMalformed : public Error {
 public:
  using Error::Error;
};

class MalformedClassFile : public Error {
 public:
  using Error::Error;
};

class SiteMapSyntax : public Error {
 public:
  SiteMapSyntax(std::size_t line, const std::string& what)
      : Error("site map line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class InconsistentProgram : public Error {
 public:
  using Error::Error;
};

class EnricherShapeMismatch : public Error {
 public:
  using Error::Error;
};

class CycleDetected : public Error {
 public:
  using Error::Error;
};

class EmptyObserved : public Error {
 public:
  EmptyObserved() : Error("observed edge set is empty") {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace heapfacts

#endif  // HEAPFACTS_ERRORS_H_
