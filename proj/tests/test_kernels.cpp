#include <doctest.h>
#include <omp.h>

#include <random>
#include <vector>

#include "gpinv/kernels.hpp"

namespace k = gpinv::kernels;
using gpinv::kernels::cplx;

namespace {

struct Data {
  std::size_t n;
  std::vector<double> vecs, w, x, a;
  std::vector<cplx> wc, ac;
};

Data make(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Data d{n, std::vector<double>(n * n), std::vector<double>(n), std::vector<double>(n),
         std::vector<double>(n * n), std::vector<cplx>(n), std::vector<cplx>(n * n)};
  for (auto& v : d.vecs) v = u(rng);
  for (auto& v : d.a) v = u(rng);
  for (auto& v : d.w) v = u(rng);
  for (auto& v : d.x) v = u(rng);
  for (auto& v : d.wc) v = {u(rng), u(rng)};
  for (auto& v : d.ac) v = {u(rng), u(rng)};
  return d;
}

}  // namespace

TEST_CASE("omp kernels are bit-identical to the serial reference") {
  const int saved = omp_get_max_threads();
  for (int threads : {1, 3, 4}) {
    omp_set_num_threads(threads);
    for (std::size_t n : {1u, 2u, 7u, 33u, 100u}) {
      CAPTURE(threads);
      CAPTURE(n);
      const Data d = make(n, 17 + n);
      std::vector<double> rs(n * n), ro(n * n), vs(n), vo(n);
      std::vector<cplx> cs(n * n), co(n * n), cvs(n), cvo(n);

      k::serial::spectral_reconstruct(d.vecs, d.w, n, rs);
      k::omp::spectral_reconstruct(d.vecs, d.w, n, ro);
      CHECK(rs == ro);
      k::serial::spectral_reconstruct(d.vecs, d.wc, n, cs);
      k::omp::spectral_reconstruct(d.vecs, d.wc, n, co);
      CHECK(cs == co);

      k::serial::spectral_apply(d.vecs, d.w, d.x, n, vs);
      k::omp::spectral_apply(d.vecs, d.w, d.x, n, vo);
      CHECK(vs == vo);
      k::serial::spectral_apply(d.vecs, d.wc, d.x, n, cvs);
      k::omp::spectral_apply(d.vecs, d.wc, d.x, n, cvo);
      CHECK(cvs == cvo);

      k::serial::matvec(d.a, d.x, n, vs);
      k::omp::matvec(d.a, d.x, n, vo);
      CHECK(vs == vo);
      k::serial::matvec(d.ac, d.x, n, cvs);
      k::omp::matvec(d.ac, d.x, n, cvo);
      CHECK(cvs == cvo);

      k::serial::matmul(d.a, d.vecs, n, rs);
      k::omp::matmul(d.a, d.vecs, n, ro);
      CHECK(rs == ro);
    }
  }
  omp_set_num_threads(saved);
}

TEST_CASE("spectral reconstruct is symmetric and matches a direct sum") {
  const std::size_t n = 12;
  const Data d = make(n, 5);
  std::vector<double> out(n * n);
  k::serial::spectral_reconstruct(d.vecs, d.w, n, out);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(out[i * n + j] == out[j * n + i]);
      double s = 0.0;
      for (std::size_t m = 0; m < n; ++m) s += d.vecs[i * n + m] * d.w[m] * d.vecs[j * n + m];
      CHECK(out[i * n + j] == doctest::Approx(s).epsilon(1e-12));
    }
  }
}

TEST_CASE("spectral apply agrees with reconstruct then matvec") {
  const std::size_t n = 20;
  const Data d = make(n, 9);
  std::vector<double> m(n * n), direct(n), applied(n);
  k::serial::spectral_reconstruct(d.vecs, d.w, n, m);
  k::serial::matvec(m, d.x, n, direct);
  k::serial::spectral_apply(d.vecs, d.w, d.x, n, applied);
  for (std::size_t i = 0; i < n; ++i) CHECK(applied[i] == doctest::Approx(direct[i]).epsilon(1e-12));
}
