#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mcnsim {

using TaskId = std::size_t;
using CoreId = std::size_t;

// Abstract time units. Conversion to seconds/femtoseconds happens in reporting.
using Time = double;

enum class ErrorKind {
  kInvalidInput,
  kCycleDetected,
  kMissingEdge,
  kUnscheduledPredecessor,
  kCoreOutOfRange,
  kArmOutOfRange,
  kMissingAffinity,
  kMissingBaseline,
  kInvalidSpec,
  kParse,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; `kind()` names the violated contract.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<double>& data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace mcnsim
