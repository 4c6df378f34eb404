#pragma once

// Minimal dense row-major matrix used throughout the library. Products go
// through the dispatched kernels; factorizations borrow Eigen.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace expcol {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> row(std::size_t i) const noexcept {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

Matrix transpose(const Matrix& a);

/// y = alpha * A x + beta * y
void multiply_add(const Matrix& a, std::span<const double> x, std::span<double> y, double alpha = 1.0,
                  double beta = 1.0);

double norm_inf(const Matrix& a);  // max row sum
double norm_1(const Matrix& a);    // max column sum
double max_abs(const Matrix& a);
double norm_inf(std::span<const double> x);
double norm_2(std::span<const double> x);
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(std::span<const double> x, std::span<const double> y);

bool all_finite(const Matrix& a);
bool all_finite(std::span<const double> x);
bool is_symmetric(const Matrix& a, double tol);

/// Solves A X = B with partial-pivot LU.
Matrix solve(const Matrix& a, const Matrix& b);

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // columns are eigenvectors
};

/// Eigendecomposition of the symmetric part of a.
SymmetricEigen symmetric_eigen(const Matrix& a);

/// V diag(f) V^T for a symmetric eigendecomposition.
Matrix reconstruct(const SymmetricEigen& eig, std::span<const double> diag);

Vector operator+(Vector a, std::span<const double> b);
Vector operator-(Vector a, std::span<const double> b);
Vector operator*(double s, Vector a);

}  // namespace expcol
