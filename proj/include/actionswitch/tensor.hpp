#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace actionswitch {

// Non-owning row-major view.
template <typename T>
struct MatrixView {
  T* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<T> row(std::size_t r) const { return {data + r * cols, cols}; }
  T& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::size_t size() const { return rows * cols; }
  std::span<T> flat() const { return {data, rows * cols}; }

  operator MatrixView<const T>() const { return {data, rows, cols}; }
};

using MatrixRef = MatrixView<double>;
using ConstMatrixRef = MatrixView<const double>;

// Owning dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  MatrixRef view() { return {data_.data(), rows_, cols_}; }
  ConstMatrixRef view() const { return {data_.data(), rows_, cols_}; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace actionswitch
