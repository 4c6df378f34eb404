#include "expcol/matfun.hpp"

#include <array>
#include <cmath>
#include <string>

#include "expcol/errors.hpp"

namespace expcol {

namespace {

// Pade degrees and the 1-norm bounds below which each one reaches unit
// roundoff (Higham 2005).
constexpr std::array<double, 5> kTheta{1.495585217958292e-2, 2.539398330063230e-1,
                                       9.504178996162932e-1, 2.097847961257068e0,
                                       5.371920351148152e0};
constexpr std::array<int, 5> kDegree{3, 5, 7, 9, 13};

constexpr std::array<double, 14> kB13{64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                      1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                      670442572800.0,      33522128640.0,       1323241920.0,
                                      40840800.0,          960960.0,            16380.0,
                                      182.0,               1.0};

std::vector<double> pade_coefficients(int m) {
  switch (m) {
    case 3:
      return {120.0, 60.0, 12.0, 1.0};
    case 5:
      return {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
    case 7:
      return {17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0};
    case 9:
      return {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
              2162160.0,     110880.0,     3960.0,       90.0,        1.0};
    default:
      return {kB13.begin(), kB13.end()};
  }
}

// r_m(A) = (V - U)^{-1} (V + U)
Matrix pade_low(const Matrix& a, int m) {
  const auto b = pade_coefficients(m);
  const std::size_t n = a.rows();
  const Matrix a2 = a * a;
  Matrix power = Matrix::identity(n);
  Matrix u_even(n, n);  // sum of b_{2j+1} A^{2j}
  Matrix v(n, n);
  for (int j = 0; 2 * j <= m; ++j) {
    if (j > 0) power = power * a2;
    v += b[static_cast<std::size_t>(2 * j)] * power;
    if (2 * j + 1 <= m) u_even += b[static_cast<std::size_t>(2 * j + 1)] * power;
  }
  const Matrix u = a * u_even;
  return solve(v - u, v + u);
}

Matrix pade13(const Matrix& a) {
  const auto& b = kB13;
  const std::size_t n = a.rows();
  const Matrix id = Matrix::identity(n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix inner_u = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
  const Matrix u = a * (inner_u + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const Matrix inner_v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
  const Matrix v = inner_v + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return solve(v - u, v + u);
}

double phi_taylor(double z, int k) {
  // sum_m z^m / (m + k)!
  double term = 1.0;
  for (int j = 2; j <= k; ++j) term /= j;
  double sum = term;
  for (int m = 1; m < 60; ++m) {
    term *= z / (m + k);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

std::vector<double> phi_scalar_all(double z, int kmax) {
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1);
  if (std::abs(z) < 1.0) {
    for (int k = 0; k <= kmax; ++k) out[static_cast<std::size_t>(k)] = phi_taylor(z, k);
    return out;
  }
  out[0] = std::exp(z);
  double inv_fact = 1.0;  // 1 / (k-1)!
  for (int k = 1; k <= kmax; ++k) {
    if (k > 1) inv_fact /= (k - 1);
    out[static_cast<std::size_t>(k)] = (out[static_cast<std::size_t>(k - 1)] - inv_fact) / z;
  }
  return out;
}

}  // namespace

Matrix expm(const Matrix& z) {
  if (!z.square()) throw InputError("expm: matrix must be square");
  if (!all_finite(z)) throw InputError("expm: non-finite entries");
  const std::size_t n = z.rows();
  if (n == 0) return z;

  const double norm = norm_1(z);
  for (std::size_t i = 0; i + 1 < kTheta.size(); ++i) {
    if (norm <= kTheta[i]) return pade_low(z, kDegree[i]);
  }
  int s = 0;
  if (norm > kTheta.back()) s = static_cast<int>(std::ceil(std::log2(norm / kTheta.back())));
  Matrix r = pade13(std::ldexp(1.0, -s) * z);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

double phi_scalar(double z, int k) {
  if (k < 0) throw InputError("phi_scalar: negative index");
  return phi_scalar_all(z, k)[static_cast<std::size_t>(k)];
}

Vector PhiTable::apply(int k, std::span<const double> v) const {
  if (k < 0 || k > kmax) throw InputError("PhiTable::apply: index out of range");
  if (v.size() != argument.rows()) throw InputError("PhiTable::apply: dimension mismatch");
  return values[static_cast<std::size_t>(k)] * v;
}

PhiTable phi_table(const Matrix& z, int kmax) {
  if (kmax < 0) throw InputError("phi_table: kmax must be >= 0, got " + std::to_string(kmax));
  if (!z.square()) throw InputError("phi_table: matrix must be square");
  if (!all_finite(z)) throw InputError("phi_table: non-finite entries");

  PhiTable table;
  table.argument = z;
  table.kmax = kmax;
  const std::size_t d = z.rows();

  if (is_symmetric(z, 0.0)) {
    const SymmetricEigen eig = symmetric_eigen(z);
    std::vector<std::vector<double>> per_k(static_cast<std::size_t>(kmax) + 1, Vector(d));
    for (std::size_t i = 0; i < d; ++i) {
      const auto vals = phi_scalar_all(eig.values[i], kmax);
      for (int k = 0; k <= kmax; ++k) per_k[static_cast<std::size_t>(k)][i] = vals[static_cast<std::size_t>(k)];
    }
    for (const auto& diag : per_k) table.values.push_back(reconstruct(eig, diag));
  } else if (kmax == 0) {
    table.values.push_back(expm(z));
  } else {
    const std::size_t blocks = static_cast<std::size_t>(kmax) + 1;
    Matrix big(d * blocks, d * blocks);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) big(i, j) = z(i, j);
    for (std::size_t b = 0; b + 1 < blocks; ++b)
      for (std::size_t i = 0; i < d; ++i) big(b * d + i, (b + 1) * d + i) = 1.0;
    const Matrix e = expm(big);
    for (std::size_t b = 0; b < blocks; ++b) {
      Matrix block(d, d);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) block(i, j) = e(i, b * d + j);
      table.values.push_back(std::move(block));
    }
  }

  for (const auto& m : table.values) {
    if (!all_finite(m)) throw NumericError("phi_table: non-finite phi-function value");
  }
  return table;
}

Vector phi_apply(const Matrix& z, int k, std::span<const double> v) {
  if (k < 0) throw InputError("phi_apply: negative index");
  if (v.size() != z.rows()) throw InputError("phi_apply: dimension mismatch");
  return phi_table(z, k).apply(k, v);
}

}  // namespace expcol
