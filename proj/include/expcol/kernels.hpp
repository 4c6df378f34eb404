#pragma once

// Dense BLAS-1/2/3 style kernels used by the integrators' inner loops.
//
// Every kernel has a portable scalar reference implementation and, where the
// target supports it, a SIMD variant (AVX2+FMA on x86-64, NEON on aarch64).
// The variant is picked once at startup from the CPU feature flags and can be
// overridden with set_backend() or the EXPCOL_KERNELS environment variable
// ("scalar", "avx2", "neon").
//
// All matrices are row-major and densely packed.

#include <cstddef>
#include <span>
#include <string_view>

namespace expcol::kernels {

enum class Backend { scalar, avx2, neon };

std::string_view backend_name(Backend b);

/// Function table for one backend.
struct KernelTable {
  Backend backend;
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// y = alpha * A x + beta * y, A is rows x cols.
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y,
               double alpha, double beta);
  /// C = A B, A is m x k, B is k x n, C is m x n (overwritten).
  void (*gemm)(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
               std::size_t n);
};

const KernelTable& scalar_table();

/// True when the backend was compiled in and the running CPU supports it.
bool backend_available(Backend b);

/// Table for a specific backend; throws std::invalid_argument if unavailable.
const KernelTable& table(Backend b);

/// Currently selected backend.
Backend active_backend();

/// Select a backend for subsequent calls. Returns the previous selection.
Backend set_backend(Backend b);

/// RAII backend override, mostly for equivalence tests.
class ScopedBackend {
 public:
  explicit ScopedBackend(Backend b) : previous_(set_backend(b)) {}
  ~ScopedBackend() { set_backend(previous_); }
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;

 private:
  Backend previous_;
};

// Span front-ends dispatching through the active backend.

double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y, double alpha = 1.0, double beta = 0.0);
void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
          std::size_t k, std::size_t n);

}  // namespace expcol::kernels
