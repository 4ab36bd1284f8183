#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace congen {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that could not be parsed. `line` is 1-based, 0 when not applicable;
/// `offset` is a byte offset into the decompressed stream, -1 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t line = 0,
             std::int64_t offset = -1)
      : Error(what), line_(line), offset_(offset) {}

  std::uint64_t line() const { return line_; }
  std::int64_t offset() const { return offset_; }

 private:
  std::uint64_t line_;
  std::int64_t offset_;
};

/// Remote generator misbehaved: bad status, malformed body, or timeouts.
class GeneratorError : public Error {
 public:
  using Error::Error;
};

}  // namespace congen
