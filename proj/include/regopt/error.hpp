#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace regopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

class DimensionTooLarge : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class ZeroGradient : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class Axis { Rows, Cols };

/// Raised when an iterated normalization meets an all-zero row or column.
class ZeroLineEncountered : public Error {
 public:
  ZeroLineEncountered(std::size_t step, Axis axis, std::size_t index)
      : Error("zero " + std::string(axis == Axis::Rows ? "row" : "column") + " " +
              std::to_string(index) + " at normalization step " + std::to_string(step)),
        step_(step),
        axis_(axis),
        index_(index) {}

  std::size_t step() const noexcept { return step_; }
  Axis axis() const noexcept { return axis_; }
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t step_;
  Axis axis_;
  std::size_t index_;
};

/// Raised inside momentum-bound runs when a pre-normalization momentum row vanishes.
class ZeroRowAbort : public Error {
 public:
  ZeroRowAbort(std::size_t iteration, std::size_t row)
      : Error("momentum row " + std::to_string(row) + " vanished at iteration " +
              std::to_string(iteration)),
        iteration_(iteration),
        row_(row) {}

  std::size_t iteration() const noexcept { return iteration_; }
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t iteration_;
  std::size_t row_;
};

}  // namespace regopt
