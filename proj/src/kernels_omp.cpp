#include "gpinv/kernels.hpp"

#include <algorithm>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gpinv::kernels {

int omp_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace omp {

namespace {

using index_t = long long;

template <typename W>
void reconstruct(std::span<const double> vecs, std::span<const W> w, std::size_t n,
                 std::span<W> out) {
  // Row i of `weighted` is row i of V scaled columnwise by w, so both operands
  // of the inner product are contiguous.
  std::vector<W> weighted(n * n);
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < static_cast<index_t>(n); ++i) {
    for (std::size_t k = 0; k < n; ++k) weighted[i * n + k] = vecs[i * n + k] * w[k];
  }
#pragma omp parallel for schedule(dynamic, 8)
  for (index_t ii = 0; ii < static_cast<index_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const W* wi = weighted.data() + i * n;
    for (std::size_t j = i; j < n; ++j) {
      const double* vj = vecs.data() + j * n;
      W acc{};
      for (std::size_t k = 0; k < n; ++k) acc += wi[k] * vj[k];
      out[i * n + j] = acc;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) out[i * n + j] = out[j * n + i];
  }
}

template <typename W>
void apply(std::span<const double> vecs, std::span<const W> w, std::span<const double> x,
           std::size_t n, std::span<W> out) {
  std::vector<double> proj(n, 0.0);
  std::vector<W> scaled(n);
  // Each thread owns a contiguous block of columns; the accumulation over i
  // runs in ascending order for every column.
#pragma omp parallel
  {
#ifdef _OPENMP
    const std::size_t nt = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t tid = static_cast<std::size_t>(omp_get_thread_num());
#else
    const std::size_t nt = 1, tid = 0;
#endif
    const std::size_t chunk = (n + nt - 1) / nt;
    const std::size_t lo = std::min(n, tid * chunk), hi = std::min(n, lo + chunk);
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = x[i];
      const double* vi = vecs.data() + i * n;
      for (std::size_t k = lo; k < hi; ++k) proj[k] += vi[k] * xi;
    }
    for (std::size_t k = lo; k < hi; ++k) scaled[k] = w[k] * proj[k];
  }
#pragma omp parallel for schedule(static)
  for (index_t ii = 0; ii < static_cast<index_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double* vi = vecs.data() + i * n;
    W acc{};
    for (std::size_t k = 0; k < n; ++k) acc += vi[k] * scaled[k];
    out[i] = acc;
  }
}

template <typename T>
void mv(std::span<const T> a, std::span<const double> x, std::size_t n, std::span<T> out) {
#pragma omp parallel for schedule(static)
  for (index_t ii = 0; ii < static_cast<index_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const T* ai = a.data() + i * n;
    T acc{};
    for (std::size_t j = 0; j < n; ++j) acc += ai[j] * x[j];
    out[i] = acc;
  }
}

}  // namespace

void spectral_reconstruct(std::span<const double> vecs, std::span<const double> w,
                          std::size_t n, std::span<double> out) {
  reconstruct(vecs, w, n, out);
}

void spectral_reconstruct(std::span<const double> vecs, std::span<const cplx> w, std::size_t n,
                          std::span<cplx> out) {
  reconstruct(vecs, w, n, out);
}

void spectral_apply(std::span<const double> vecs, std::span<const double> w,
                    std::span<const double> x, std::size_t n, std::span<double> out) {
  apply(vecs, w, x, n, out);
}

void spectral_apply(std::span<const double> vecs, std::span<const cplx> w,
                    std::span<const double> x, std::size_t n, std::span<cplx> out) {
  apply(vecs, w, x, n, out);
}

void matvec(std::span<const double> a, std::span<const double> x, std::size_t n,
            std::span<double> out) {
  mv(a, x, n, out);
}

void matvec(std::span<const cplx> a, std::span<const double> x, std::size_t n,
            std::span<cplx> out) {
  mv(a, x, n, out);
}

void matmul(std::span<const double> a, std::span<const double> b, std::size_t n,
            std::span<double> out) {
#pragma omp parallel for schedule(static)
  for (index_t ii = 0; ii < static_cast<index_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double* oi = out.data() + i * n;
    std::fill(oi, oi + n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a[i * n + k];
      const double* bk = b.data() + k * n;
      for (std::size_t j = 0; j < n; ++j) oi[j] += aik * bk[j];
    }
  }
}

}  // namespace omp
}  // namespace gpinv::kernels
