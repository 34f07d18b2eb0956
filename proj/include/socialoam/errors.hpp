#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace socialoam {

/// Base of every error raised by the library. CLI exit codes are derived from
/// is_io(): I/O failures map to 2, everything else to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual bool is_io() const noexcept { return false; }
};

class IoError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] bool is_io() const noexcept override { return true; }
};

class SourceUnreachable : public IoError {
 public:
  SourceUnreachable(std::string source_id, const std::string& what)
      : IoError("source '" + source_id + "' unreachable: " + what), source_id_(std::move(source_id)) {}
  [[nodiscard]] const std::string& source_id() const noexcept { return source_id_; }

 private:
  std::string source_id_;
};

class MalformedPayload : public Error {
 public:
  using Error::Error;
};

class MissingRequiredField : public Error {
 public:
  using Error::Error;
};

class UnparseableTimestamp : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A value violates a type invariant. row() is the 1-based data row for file
/// loaders, 0 otherwise.
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what, std::size_t row = 0)
      : Error(row ? "row " + std::to_string(row) + ": " + what : what), row_(row) {}
  [[nodiscard]] std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class NonUniformPeriod : public Error {
 public:
  using Error::Error;
};

class InsufficientHistory : public Error {
 public:
  using Error::Error;
};

class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class NoDefinedCorrelations : public Error {
 public:
  using Error::Error;
};

class UnknownCell : public Error {
 public:
  using Error::Error;
};

class MissingData : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

}  // namespace socialoam
