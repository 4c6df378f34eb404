#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"

namespace expcol::kernels {

namespace {

constexpr KernelTable kScalar{Backend::scalar, detail::dot_scalar, detail::axpy_scalar,
                              detail::gemv_scalar, detail::gemm_scalar};
#if defined(EXPCOL_HAVE_AVX2)
constexpr KernelTable kAvx2{Backend::avx2, detail::dot_avx2, detail::axpy_avx2, detail::gemv_avx2,
                            detail::gemm_avx2};
#endif
#if defined(EXPCOL_HAVE_NEON)
constexpr KernelTable kNeon{Backend::neon, detail::dot_neon, detail::axpy_neon, detail::gemv_neon,
                            detail::gemm_neon};
#endif

bool cpu_supports(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(EXPCOL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
#if defined(EXPCOL_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend initial_backend() {
  if (const char* env = std::getenv("EXPCOL_KERNELS")) {
    const std::string name(env);
    if (name == "scalar") return Backend::scalar;
    if (name == "avx2" && cpu_supports(Backend::avx2)) return Backend::avx2;
    if (name == "neon" && cpu_supports(Backend::neon)) return Backend::neon;
  }
  if (cpu_supports(Backend::avx2)) return Backend::avx2;
  if (cpu_supports(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&table(initial_backend())};
  return slot;
}

inline const KernelTable& active() { return *active_slot().load(std::memory_order_relaxed); }

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_table() { return kScalar; }

bool backend_available(Backend b) { return cpu_supports(b); }

const KernelTable& table(Backend b) {
  if (!cpu_supports(b)) {
    throw std::invalid_argument("kernel backend not available: " + std::string(backend_name(b)));
  }
  switch (b) {
    case Backend::scalar:
      return kScalar;
#if defined(EXPCOL_HAVE_AVX2)
    case Backend::avx2:
      return kAvx2;
#endif
#if defined(EXPCOL_HAVE_NEON)
    case Backend::neon:
      return kNeon;
#endif
    default:
      break;
  }
  return kScalar;
}

Backend active_backend() { return active().backend; }

Backend set_backend(Backend b) {
  const KernelTable* next = &table(b);
  return active_slot().exchange(next)->backend;
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
  return active().dot(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  active().axpy(a, x.data(), y.data(), x.size());
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y, double alpha, double beta) {
  if (a.size() != rows * cols || x.size() != cols || y.size() != rows) {
    throw std::invalid_argument("gemv: size mismatch");
  }
  active().gemv(a.data(), rows, cols, x.data(), y.data(), alpha, beta);
}

void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
          std::size_t k, std::size_t n) {
  if (a.size() != m * k || b.size() != k * n || c.size() != m * n) {
    throw std::invalid_argument("gemm: size mismatch");
  }
  active().gemm(a.data(), b.data(), c.data(), m, k, n);
}

}  // namespace expcol::kernels
