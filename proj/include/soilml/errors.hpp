#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace soilml {

/// Base class for every failure the library reports.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad input values, shapes, or preconditions.
struct ValidationError : Error {
  using Error::Error;
};

/// Malformed text input. `row` is 1-based.
struct ParseError : Error {
  ParseError(std::string file, std::size_t row_index, const std::string& what)
      : Error(file + ":" + std::to_string(row_index) + ": " + what),
        path(std::move(file)),
        row(row_index) {}
  std::string path;
  std::size_t row = 0;
};

/// Too few samples for the requested operation.
struct InsufficientDataError : ValidationError {
  using ValidationError::ValidationError;
};

/// Dilution target at or above the stock molarity.
struct InfeasibleDilutionError : ValidationError {
  using ValidationError::ValidationError;
};

/// A feature column with zero variance cannot be standardized.
struct DegenerateFeatureError : ValidationError {
  using ValidationError::ValidationError;
};

/// Rank-deficient design matrix in a least-squares fit.
struct SingularDesignError : ValidationError {
  using ValidationError::ValidationError;
};

/// Training produced a non-finite loss.
struct DivergenceError : Error {
  DivergenceError(int at_epoch, const std::string& what)
      : Error(what + " at epoch " + std::to_string(at_epoch)), epoch(at_epoch) {}
  int epoch = 0;
};

/// Score undefined, e.g. R^2 on a zero-variance output.
struct UndefinedScoreError : ValidationError {
  using ValidationError::ValidationError;
};

/// No scaling factor stored for the requested model/nutrient pair.
struct CalibrationMissingError : Error {
  using Error::Error;
};

/// Calibration ratio against a zero prediction.
struct CalibrationDegenerateError : Error {
  using Error::Error;
};

}  // namespace soilml
