#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace earforge {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input or inconsistent state. The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (singular system, solver breakdown, non-finite values).
/// The CLI maps these to exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

class InvalidBlankError : public ValidationError {
 public:
  InvalidBlankError(const std::string& what, double theta)
      : ValidationError(what), theta_(theta) {}
  double theta() const noexcept { return theta_; }

 private:
  double theta_;
};

class SingularDesignError : public NumericError {
 public:
  SingularDesignError(const std::string& what, std::vector<std::string> columns)
      : NumericError(what), columns_(std::move(columns)) {}
  const std::vector<std::string>& dependent_columns() const noexcept { return columns_; }

 private:
  std::vector<std::string> columns_;
};

class InsufficientDataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class AmbiguityError : public ValidationError {
 public:
  AmbiguityError(const std::string& what, std::vector<double> duplicates)
      : ValidationError(what), duplicates_(std::move(duplicates)) {}
  const std::vector<double>& duplicate_angles() const noexcept { return duplicates_; }

 private:
  std::vector<double> duplicates_;
};

class LifecycleError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IntegrityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MigrationNeededError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class FreshStateError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace earforge
