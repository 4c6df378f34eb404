#pragma once

#include "expcol/kernels.hpp"

namespace expcol::kernels::detail {

double dot_scalar(const double* x, const double* y, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
void gemv_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y,
                 double alpha, double beta);
void gemm_scalar(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t n);

#if defined(EXPCOL_HAVE_AVX2)
double dot_avx2(const double* x, const double* y, std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
void gemv_avx2(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y,
               double alpha, double beta);
void gemm_avx2(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
               std::size_t n);
#endif

#if defined(EXPCOL_HAVE_NEON)
double dot_neon(const double* x, const double* y, std::size_t n);
void axpy_neon(double a, const double* x, double* y, std::size_t n);
void gemv_neon(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y,
               double alpha, double beta);
void gemm_neon(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
               std::size_t n);
#endif

}  // namespace expcol::kernels::detail
