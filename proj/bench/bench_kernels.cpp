// Serial reference vs OpenMP kernels, plus the end-to-end pinv path.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gpinv/gallery.hpp"
#include "gpinv/kernels.hpp"
#include "gpinv/linalg.hpp"

namespace {

namespace k = gpinv::kernels;

struct Inputs {
  std::size_t n;
  std::vector<double> vecs, w, x, a;
  std::vector<k::cplx> wc;

  explicit Inputs(std::size_t dim) : n(dim), vecs(dim * dim), w(dim), x(dim), a(dim * dim), wc(dim) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : vecs) v = u(rng);
    for (auto& v : a) v = u(rng);
    for (auto& v : x) v = u(rng);
    for (std::size_t i = 0; i < dim; ++i) {
      w[i] = u(rng);
      wc[i] = {u(rng), u(rng)};
    }
  }
};

template <bool Omp>
void BM_reconstruct(benchmark::State& state) {
  const Inputs in(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(in.n * in.n);
  for (auto _ : state) {
    if constexpr (Omp) k::omp::spectral_reconstruct(in.vecs, in.w, in.n, out);
    else k::serial::spectral_reconstruct(in.vecs, in.w, in.n, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["threads"] = Omp ? k::omp_threads() : 1;
}

template <bool Omp>
void BM_resolvent_apply(benchmark::State& state) {
  const Inputs in(static_cast<std::size_t>(state.range(0)));
  std::vector<k::cplx> out(in.n);
  for (auto _ : state) {
    if constexpr (Omp) k::omp::spectral_apply(in.vecs, in.wc, in.x, in.n, out);
    else k::serial::spectral_apply(in.vecs, in.wc, in.x, in.n, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Omp>
void BM_matmul(benchmark::State& state) {
  const Inputs in(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(in.n * in.n);
  for (auto _ : state) {
    if constexpr (Omp) k::omp::matmul(in.a, in.vecs, in.n, out);
    else k::serial::matmul(in.a, in.vecs, in.n, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_pinv_jacobi_free(benchmark::State& state) {
  const auto& model = *gpinv::find_builtin("jacobi_free");
  const auto a = gpinv::truncate(model, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gpinv::pinv(a).norm);
}

}  // namespace

BENCHMARK(BM_reconstruct<false>)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_reconstruct<true>)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_resolvent_apply<false>)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_resolvent_apply<true>)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_matmul<false>)->RangeMultiplier(4)->Range(64, 512)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_matmul<true>)->RangeMultiplier(4)->Range(64, 512)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_pinv_jacobi_free)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
