#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace juris {

enum class ErrorKind {
  Parse,           // malformed XML or data file
  Incomplete,      // document lacks a description
  Io,              // unreadable source or unwritable target
  EmptyCorpus,     // nothing survived ingestion
  OutOfRange,      // value outside its accepted domain
  DegenerateTask,  // fewer than two classes retained
  Config,          // invalid configuration or lexicon
  Input,           // caller violated an operation precondition
  Label,           // label not part of the scheme
  State,           // object used before it was trained/loaded
  Integrity,       // persisted artifacts do not agree with each other
  Leakage,         // test documents reached a fitted component
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::optional<std::size_t> byte_offset)
      : Error(ErrorKind::Parse,
              byte_offset ? what + " (at byte " + std::to_string(*byte_offset) + ")"
                          : what),
        byte_offset_(byte_offset) {}

  std::optional<std::size_t> byte_offset() const noexcept { return byte_offset_; }

 private:
  std::optional<std::size_t> byte_offset_;
};

}  // namespace juris
