#ifndef ROTORPATH_MATRIX_HPP
#define ROTORPATH_MATRIX_HPP

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace rotorpath {

/// Dense square matrix in row-major storage. Dimensions here are tiny (N <= a few dozen).
template <class T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, T fill = T{}) : n_(n), data_(n * n, fill) {}

  static SquareMatrix identity(std::size_t n) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t size() const noexcept { return n_; }

  T& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * n_ + col]; }
  const T& operator()(std::size_t row, std::size_t col) const noexcept { return data_[row * n_ + col]; }

  std::span<T> row(std::size_t r) noexcept { return {data_.data() + r * n_, n_}; }
  std::span<const T> row(std::size_t r) const noexcept { return {data_.data() + r * n_, n_}; }

  std::span<const T> data() const noexcept { return data_; }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  bool operator==(const SquareMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

using RealMatrix = SquareMatrix<double>;
using ComplexMatrix = SquareMatrix<std::complex<double>>;

}  // namespace rotorpath

#endif
