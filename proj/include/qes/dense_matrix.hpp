#pragma once

#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace qes {

// Row-major dense matrix over an arbitrary field-like scalar (double,
// boost::rational, ...). Small sizes only; no expression templates.
template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, T fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  DenseMatrix& operator+=(const DenseMatrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  DenseMatrix& operator-=(const DenseMatrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  DenseMatrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
  friend DenseMatrix operator*(DenseMatrix a, const T& s) { return a *= s; }
  friend DenseMatrix operator*(const T& s, DenseMatrix a) { return a *= s; }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("DenseMatrix: shape mismatch in product");
    DenseMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == T(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend std::ostream& operator<<(std::ostream& os, const DenseMatrix& m) {
    for (std::size_t i = 0; i < m.rows_; ++i) {
      os << '[';
      for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? ", " : "") << m(i, j);
      os << "]\n";
    }
    return os;
  }

 private:
  void check_same_shape(const DenseMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument("DenseMatrix: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <class T>
DenseMatrix<T> commutator(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  return a * b - b * a;
}

}  // namespace qes
