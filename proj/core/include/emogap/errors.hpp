#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace emogap {

// Base for every error the toolkit raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument to an operation (bad threshold, empty input, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Corpus header does not contain a mapped column.
class SchemaError : public Error {
 public:
  explicit SchemaError(std::string column);
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

// A data row failed validation. Rows are 1-based data rows (header excluded).
class RowError : public Error {
 public:
  RowError(std::size_t row, std::string column, const std::string& what);
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

// Model artifact is malformed or fails its checksum.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Metric is undefined for the input (e.g. AUC with a single class).
class MetricError : public Error {
 public:
  using Error::Error;
};

// Every token fell below the document-frequency floor.
class EmptyVocabularyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Pipeline failure tagged with the stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause);
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace emogap
