#include "gpinv/kernels.hpp"

#include <vector>

namespace gpinv::kernels::serial {

namespace {

template <typename W>
void reconstruct(std::span<const double> vecs, std::span<const W> w, std::size_t n,
                 std::span<W> out) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      W acc{};
      for (std::size_t k = 0; k < n; ++k) acc += (vecs[i * n + k] * w[k]) * vecs[j * n + k];
      out[i * n + j] = acc;
      out[j * n + i] = acc;
    }
  }
}

template <typename W>
void apply(std::span<const double> vecs, std::span<const W> w, std::span<const double> x,
           std::size_t n, std::span<W> out) {
  std::vector<W> scaled(n);
  for (std::size_t k = 0; k < n; ++k) {
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) t += vecs[i * n + k] * x[i];
    scaled[k] = w[k] * t;
  }
  for (std::size_t i = 0; i < n; ++i) {
    W acc{};
    for (std::size_t k = 0; k < n; ++k) acc += vecs[i * n + k] * scaled[k];
    out[i] = acc;
  }
}

template <typename T>
void mv(std::span<const T> a, std::span<const double> x, std::size_t n, std::span<T> out) {
  for (std::size_t i = 0; i < n; ++i) {
    T acc{};
    for (std::size_t j = 0; j < n; ++j) acc += a[i * n + j] * x[j];
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
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += a[i * n + k] * b[k * n + j];
      out[i * n + j] = acc;
    }
  }
}

}  // namespace gpinv::kernels::serial
