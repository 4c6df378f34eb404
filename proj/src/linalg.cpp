#include "expcol/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "expcol/errors.hpp"
#include "expcol/kernels.hpp"

namespace expcol {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> view(const Matrix& m) {
  return Eigen::Map<const RowMajor>(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                                    static_cast<Eigen::Index>(m.cols()));
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError(std::string(what) + ": shape mismatch");
}

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InputError("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InputError("matrix product: inner dimension mismatch");
  Matrix c(a.rows(), b.cols());
  kernels::gemm(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw InputError("matrix-vector product: dimension mismatch");
  Vector y(a.rows());
  kernels::gemv(a.data(), a.rows(), a.cols(), x, y, 1.0, 0.0);
  return y;
}

void multiply_add(const Matrix& a, std::span<const double> x, std::span<double> y, double alpha,
                  double beta) {
  if (a.cols() != x.size() || a.rows() != y.size()) throw InputError("multiply_add: dimension mismatch");
  kernels::gemv(a.data(), a.rows(), a.cols(), x, y, alpha, beta);
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

double norm_inf(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

double norm_1(const Matrix& a) {
  Vector colsum(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) colsum[j] += std::abs(a(i, j));
  return colsum.empty() ? 0.0 : *std::max_element(colsum.begin(), colsum.end());
}

double max_abs(const Matrix& a) { return norm_inf(a.data()); }

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double norm_2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  return max_abs_diff(a.data(), b.data());
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

bool all_finite(const Matrix& a) { return all_finite(a.data()); }

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

bool is_symmetric(const Matrix& a, double tol) {
  if (!a.square()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

Matrix solve(const Matrix& a, const Matrix& b) {
  if (!a.square() || a.rows() != b.rows()) throw InputError("solve: dimension mismatch");
  const Eigen::PartialPivLU<RowMajor> lu(view(a));
  const RowMajor x = lu.solve(view(b));
  Matrix out(b.rows(), b.cols());
  Eigen::Map<RowMajor>(out.data().data(), x.rows(), x.cols()) = x;
  return out;
}

SymmetricEigen symmetric_eigen(const Matrix& a) {
  if (!a.square()) throw InputError("symmetric_eigen: matrix must be square");
  const RowMajor sym = 0.5 * (view(a) + view(a).transpose());
  const Eigen::SelfAdjointEigenSolver<RowMajor> es(sym);
  if (es.info() != Eigen::Success) throw NumericError("symmetric_eigen: decomposition failed");
  SymmetricEigen out;
  out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  out.vectors = Matrix(a.rows(), a.cols());
  Eigen::Map<RowMajor>(out.vectors.data().data(), sym.rows(), sym.cols()) = es.eigenvectors();
  return out;
}

Matrix reconstruct(const SymmetricEigen& eig, std::span<const double> diag) {
  const std::size_t n = eig.values.size();
  if (diag.size() != n) throw InputError("reconstruct: size mismatch");
  Matrix scaled = eig.vectors;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scaled(i, j) *= diag[j];
  return scaled * transpose(eig.vectors);
}

Vector operator+(Vector a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("vector add: size mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

Vector operator-(Vector a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("vector subtract: size mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

Vector operator*(double s, Vector a) {
  for (auto& v : a) v *= s;
  return a;
}

}  // namespace expcol
