#include <doctest.h>

#include <cmath>
#include <map>

#include "gpinv/diagnostics.hpp"
#include "gpinv/error.hpp"
#include "oracles.hpp"

using namespace gpinv;

namespace {

const SpectralModel& model(std::string_view name) { return *find_builtin(name); }

ProbeSet probes(std::vector<Probe> v, std::vector<cplx> l = {cplx(0.0, 1.0)}) { return ProbeSet{std::move(v), std::move(l)}; }

const std::vector<std::size_t> kSmall{2, 4, 8, 16, 32, 64};

std::vector<double> residuals_for(const ResidualTable& t, const std::string& id) {
  std::vector<double> out;
  for (const auto& r : t.rows) {
    if (r.probe_id == id) out.push_back(r.residual);
  }
  return out;
}

}  // namespace

TEST_CASE("probe set validation") {
  CHECK_NOTHROW(ProbeSet::defaults().validate());
  auto bad = ProbeSet::defaults();
  bad.lambdas.push_back(cplx(2.0, 0.0));
  try {
    bad.validate();
    FAIL("expected NonRealRequired");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonRealRequired);
  }
  auto dup = ProbeSet::defaults();
  dup.vectors.push_back(dup.vectors.front());
  CHECK_THROWS_AS(dup.validate(), Error);
  for (const auto& p : ProbeSet::defaults().finite_only().vectors) CHECK(p.vector.finitely_supported());
}

TEST_CASE("resolvent: Linear e_1 is exact at every n") {
  const auto t = check_resolvent_consistency(model("linear"), probes({{"e1", CoeffVector::basis(1)}}), kSmall);
  REQUIRE(t.rows.size() == kSmall.size());
  for (const auto& r : t.rows) CHECK(r.residual <= 1e-15);
}

TEST_CASE("resolvent: Linear with a truncated 1/k^2 probe follows the exact tail sum") {
  std::vector<double> u(64);
  for (std::size_t k = 1; k <= 64; ++k) u[k - 1] = 1.0 / static_cast<double>(k * k);
  const auto t = check_resolvent_consistency(model("linear"), probes({{"u", CoeffVector(u)}}), kSmall);
  REQUIRE(t.rows.size() == kSmall.size());
  for (std::size_t i = 0; i < kSmall.size(); ++i) {
    long double s = 0.0L;
    for (std::size_t k = 64; k > kSmall[i]; --k) {
      const long double kk = k;
      s += 1.0L / ((1.0L + kk * kk) * kk * kk * kk * kk);
    }
    CHECK(std::abs(t.rows[i].residual - std::sqrt(static_cast<double>(s))) <= 1e-12);
    if (i > 0) CHECK(t.rows[i].residual < t.rows[i - 1].residual);
  }
  CHECK(t.rows.back().residual == 0.0);
}

TEST_CASE("resolvent: infinite tails use exact tail sums") {
  const auto t = check_resolvent_consistency(model("unit"), probes({{"p", CoeffVector::power_law(1.0, 2.0)}}), kSmall);
  for (std::size_t i = 0; i < kSmall.size(); ++i) {
    // |i - 1|^-2 = 1/2 on every coordinate beyond n.
    const double want = std::sqrt(0.5 * oracle::power_tail(4.0, kSmall[i]));
    CHECK(t.rows[i].residual == doctest::Approx(want).epsilon(1e-10));
  }
  const auto lin = check_resolvent_consistency(model("linear"), probes({{"p", CoeffVector::power_law(1.0, 3.0)}}),
                                               kSmall);
  for (std::size_t i = 0; i < kSmall.size(); ++i) {
    long double s = 0.0L;
    for (std::size_t k = 400000; k > kSmall[i]; --k) {
      const long double kk = k;
      s += 1.0L / ((1.0L + kk * kk) * std::pow(kk, 6.0L));
    }
    CHECK(lin.rows[i].residual == doctest::Approx(std::sqrt(static_cast<double>(s))).epsilon(1e-9));
  }
}

TEST_CASE("resolvent: zero model is exact past the support") {
  const CoeffVector u(std::vector<double>{1.0, -2.0, 3.0});
  const auto t = check_resolvent_consistency(model("zero"), probes({{"u", u}}, {cplx(0.0, 1.0), cplx(1.0, 2.0)}), kSmall);
  for (const auto& r : t.rows) {
    if (r.n >= 3) CHECK(r.residual == 0.0);
  }
}

TEST_CASE("resolvent: Jacobi reference converges and stays below 1e-6") {
  const auto t = check_resolvent_consistency(model("jacobi_shifted3"), probes({{"e1", CoeffVector::basis(1)}}),
                                             std::vector<std::size_t>{8, 16, 32, 64});
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows.back().residual <= 1e-6);
  CHECK(t.reference_error <= 0.1 * t.rows.back().residual + 1e-14);
}

TEST_CASE("graph: diagonal models are exact once n reaches the probe") {
  for (const char* name : {"linear", "harmonic", "kernel_gap", "unit", "zero"}) {
    CAPTURE(name);
    const auto t = check_graph_convergence(
        model(name), probes({{"e1", CoeffVector::basis(1)}, {"e3", CoeffVector::basis(3)}}), kSmall);
    for (const auto& r : t.rows) CHECK(r.residual == 0.0);
    REQUIRE(t.skipped.size() == 1);
    CHECK(t.skipped[0].n == 2);
    CHECK(t.skipped[0].probe_id == "e3");
  }
}

TEST_CASE("graph: Jacobi residuals match dense complex solves") {
  const std::vector<std::size_t> sched{4, 8, 16, 32, 64, 128, 256};
  for (auto [name, a, j] : {std::tuple{"jacobi_free", 0.0, 2u}, std::tuple{"jacobi_shifted3", 3.0, 1u}}) {
    CAPTURE(name);
    const auto t = check_graph_convergence(model(name), probes({{"u", CoeffVector::basis(j)}}), sched);
    REQUIRE(t.rows.size() == sched.size());
    const oracle::cplx i(0.0, 1.0);
    for (std::size_t s = 0; s < sched.size(); ++s) {
      const std::size_t n = sched[s];
      std::vector<oracle::cplx> rhs(n, 0.0), au(n, 0.0);
      au[j - 1] = a;
      au[j] = 1.0;
      if (j >= 2) au[j - 2] = 1.0;
      for (std::size_t k = 0; k < n; ++k) rhs[k] = -au[k];
      rhs[j - 1] += i;
      const auto w = oracle::complex_solve(oracle::shifted_tridiagonal(n, a, 1.0, i), rhs);
      double du = 0.0, dau = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const oracle::cplx e = k == j - 1 ? 1.0 : 0.0;
        oracle::cplx aw = a * w[k];
        if (k > 0) aw += w[k - 1];
        if (k + 1 < n) aw += w[k + 1];
        du += std::norm(w[k] - e);
        dau += std::norm(aw - au[k]);
      }
      const double want = std::sqrt(du) + std::sqrt(dau);
      CHECK(std::abs(t.rows[s].residual - want) <= 1e-10);
    }
    CHECK(t.rows.back().residual <= 1e-6);
  }
}

TEST_CASE("graph probes must be finitely supported") {
  CHECK_THROWS_AS(check_graph_convergence(model("linear"), probes({{"p", CoeffVector::power_law(1.0, 3.0)}}), kSmall),
                  Error);
}

TEST_CASE("projection examples") {
  const auto kg = check_projection_convergence(
      model("kernel_gap"),
      probes({{"x", CoeffVector(std::vector<double>{7.0, 2.0, 5.0})}, {"e1", CoeffVector::basis(1)}}), kSmall);
  for (const auto& r : kg.rows) {
    if (r.n >= 3) CHECK(r.residual <= 1e-12);
  }
  for (double v : residuals_for(kg, "e1:range")) CHECK(v == 0.0);
  const auto lin = check_projection_convergence(model("linear"), probes({{"x", CoeffVector::power_law(1.0, 1.0)}}),
                                                kSmall);
  for (double v : residuals_for(lin, "x:kernel")) CHECK(v == 0.0);
  try {
    check_projection_convergence(model("jacobi_free"), ProbeSet::defaults(), kSmall);
    FAIL("expected UnsupportedModel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedModel);
  }
}

TEST_CASE("moving target examples") {
  const auto unit = check_moving_target(model("unit"), CoeffVector::basis(1), 1.0, kSmall);
  const auto doubled = check_moving_target(model("unit"), CoeffVector::basis(1), 2.0, kSmall);
  REQUIRE(unit.rows.size() == kSmall.size());
  for (std::size_t i = 0; i < kSmall.size(); ++i) {
    CHECK(std::abs(unit.rows[i].residual - 1.0 / static_cast<double>(kSmall[i])) <= 1e-14);
    CHECK(std::abs(doubled.rows[i].residual - 2.0 * unit.rows[i].residual) <= 1e-12 * doubled.rows[i].residual);
  }
  for (const char* name : {"linear", "harmonic", "jacobi_free", "jacobi_shifted3"}) {
    const auto z = check_moving_target(model(name), CoeffVector::basis(1), 0.0, kSmall);
    for (const auto& r : z.rows) CHECK(r.residual == 0.0);
  }
  const auto free = check_moving_target(model("jacobi_free"), CoeffVector::basis(2), 1.0, kSmall);
  for (const auto& r : free.rows) {
    if (r.n >= 3) CHECK(std::abs(r.residual - 1.0 / static_cast<double>(r.n)) <= 1e-14);
  }
}

TEST_CASE("moving target is homogeneous in the perturbation scale") {
  for (const char* name : {"linear", "harmonic", "jacobi_shifted3"}) {
    const auto a = check_moving_target(model(name), CoeffVector::basis(2), 1.0, kSmall);
    const auto b = check_moving_target(model(name), CoeffVector::basis(2), 3.0, kSmall);
    REQUIRE(a.rows.size() == b.rows.size());
    // Below n = 3 the truncation drops part of A e_2 for the Jacobi model.
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      if (a.rows[i].n < 3) continue;
      CHECK(b.rows[i].residual == doctest::Approx(3.0 * a.rows[i].residual).epsilon(1e-12));
    }
  }
}

TEST_CASE("Moore-Penrose identities") {
  for (const auto& a : {SymMatrix::diagonal(std::vector<double>{2.0, 0.0}), SymMatrix::identity(3)}) {
    const auto r = check_mp_identities(a);
    CHECK(r.max_residual() == 0.0);
  }
  std::mt19937_64 rng(20);
  const auto r = check_mp_identities(SymMatrix::from_rows(20, oracle::random_symmetric(20, rng)));
  CHECK(r.max_residual() <= 1e-9 * 20);
  CHECK(r.rank == 20);
}

TEST_CASE("mp identity table has one row per identity and n") {
  const auto t = mp_identity_table(model("kernel_gap"), kSmall);
  CHECK(t.rows.size() == 7 * kSmall.size());
  for (const auto& r : t.rows) CHECK(r.residual <= 1e-9 * static_cast<double>(r.n));
}

TEST_CASE("summary uses the last row of each group") {
  ResidualTable t;
  t.rows = {{1, "a", std::nullopt, 3.0}, {2, "a", std::nullopt, 1.0}, {1, "b", std::nullopt, 0.5},
            {2, "b", std::nullopt, 2.0}};
  t.summarize();
  CHECK(t.summary.max_final_residual == 2.0);
  CHECK(t.summary.monotone_fraction == 0.5);
}
