// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace abelia {

// Base of every error raised by the library. kind() gives a stable tag that
// the command line tool prints and maps to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

#define ABELIA_ERROR_CLASS(Name, Tag)                              \
  class Name : public Error {                                      \
   public:                                                         \
    using Error::Error;                                            \
    const char* kind() const noexcept override { return Tag; }     \
  };

ABELIA_ERROR_CLASS(ArgumentError, "argument")
ABELIA_ERROR_CLASS(DomainError, "domain")
ABELIA_ERROR_CLASS(ResourceError, "resource")
ABELIA_ERROR_CLASS(SearchFailure, "search")
ABELIA_ERROR_CLASS(ParseError, "parse")
ABELIA_ERROR_CLASS(FileError, "file")

#undef ABELIA_ERROR_CLASS

}  // namespace abelia
