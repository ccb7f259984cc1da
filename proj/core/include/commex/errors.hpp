#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace commex {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class UnknownNode : public Error {
 public:
  UnknownNode(std::size_t node, std::size_t n_nodes);
};

class BudgetExhausted : public Error {
 public:
  explicit BudgetExhausted(std::size_t budget);
};

class DuplicateQuery : public Error {
 public:
  explicit DuplicateQuery(std::size_t node);
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::filesystem::path& file, std::size_t line,
             const std::string& what);

  const std::filesystem::path& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::filesystem::path file_;
  std::size_t line_;
};

class InconsistentDims : public Error {
 public:
  using Error::Error;
};

class MissingFile : public Error {
 public:
  explicit MissingFile(const std::filesystem::path& file);
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class NonFiniteLoss : public Error {
 public:
  NonFiniteLoss(std::size_t epoch, double value);
};

class NoCandidates : public Error {
 public:
  NoCandidates();
};

}  // namespace commex
