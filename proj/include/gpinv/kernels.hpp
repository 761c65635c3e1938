#pragma once

// Dense kernels over row-major square storage. Two interchangeable
// implementations share one signature set: `serial` is the straightforward
// reference, `omp` distributes output rows over OpenMP threads. Each output
// element is accumulated by exactly one thread in a fixed order, so both
// produce bit-identical results independent of the thread count.

#include <complex>
#include <cstddef>
#include <span>

namespace gpinv::kernels {

using cplx = std::complex<double>;

#define GPINV_KERNEL_DECLS                                                                   \
  /* out = V diag(w) V^T; column k of V is basis vector k. out is exactly symmetric. */      \
  void spectral_reconstruct(std::span<const double> vecs, std::span<const double> w,         \
                            std::size_t n, std::span<double> out);                           \
  void spectral_reconstruct(std::span<const double> vecs, std::span<const cplx> w,           \
                            std::size_t n, std::span<cplx> out);                             \
  /* out = V diag(w) V^T x, in O(n^2) without forming the matrix. */                         \
  void spectral_apply(std::span<const double> vecs, std::span<const double> w,               \
                      std::span<const double> x, std::size_t n, std::span<double> out);      \
  void spectral_apply(std::span<const double> vecs, std::span<const cplx> w,                 \
                      std::span<const double> x, std::size_t n, std::span<cplx> out);        \
  void matvec(std::span<const double> a, std::span<const double> x, std::size_t n,           \
              std::span<double> out);                                                        \
  void matvec(std::span<const cplx> a, std::span<const double> x, std::size_t n,             \
              std::span<cplx> out);                                                          \
  void matmul(std::span<const double> a, std::span<const double> b, std::size_t n,           \
              std::span<double> out);

namespace serial {
GPINV_KERNEL_DECLS
}  // namespace serial

namespace omp {
GPINV_KERNEL_DECLS
}  // namespace omp

#undef GPINV_KERNEL_DECLS

// Number of threads the omp kernels will use (1 when built without OpenMP).
int omp_threads() noexcept;

}  // namespace gpinv::kernels
