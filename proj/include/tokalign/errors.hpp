#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tokalign {

// Base of every error raised by the library. Data problems (bad files,
// uncoverable bytes, dead ends) derive from Error; caller bugs raise
// ContractViolation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. `where` names the line or field.
class FormatError : public Error {
 public:
  FormatError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where_(where) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class EncodingError : public Error {
 public:
  EncodingError(std::size_t offset, const std::string& what)
      : Error("byte offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// No vocabulary token is compatible with the alignment prefix.
class EmptyMaskError : public Error {
 public:
  explicit EmptyMaskError(std::string prefix)
      : Error("no token is compatible with alignment prefix of " +
              std::to_string(prefix.size()) + " bytes"),
        prefix_(std::move(prefix)) {}
  const std::string& prefix() const noexcept { return prefix_; }

 private:
  std::string prefix_;
};

// Alignment could not consume the prefix and the fallback policy gave up.
class DeadEndError : public Error {
 public:
  DeadEndError(std::string remaining_prefix, std::size_t steps, const std::string& what)
      : Error(what), remaining_(std::move(remaining_prefix)), steps_(steps) {}
  const std::string& remaining_prefix() const noexcept { return remaining_; }
  std::size_t steps_taken() const noexcept { return steps_; }

 private:
  std::string remaining_;
  std::size_t steps_;
};

class NoCutPoint : public Error {
 public:
  using Error::Error;
};

}  // namespace tokalign
