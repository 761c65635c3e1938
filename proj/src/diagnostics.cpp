#include "gpinv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <set>

#include <complex>
#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "gpinv/error.hpp"
#include "gpinv/kernels.hpp"
#include "parallel.hpp"

namespace gpinv {

ProbeSet ProbeSet::defaults() {
  ProbeSet p;
  p.vectors = {{"e1", CoeffVector::basis(1)},
               {"e2", CoeffVector::basis(2)},
               {"e3", CoeffVector::basis(3)},
               {"pow3", CoeffVector::power_law(1.0, 3.0)}};
  p.lambdas = {cplx(0.0, 1.0), cplx(0.0, 2.0), cplx(1.0, 1.0)};
  return p;
}

ProbeSet ProbeSet::finite_only() const {
  ProbeSet p;
  p.lambdas = lambdas;
  for (const auto& v : vectors) {
    if (v.vector.finitely_supported()) p.vectors.push_back(v);
  }
  return p;
}

void ProbeSet::validate() const {
  std::set<std::string> ids;
  for (const auto& v : vectors) {
    if (!ids.insert(v.id).second) throw Error(ErrorCode::InvalidArgument, "duplicate probe id " + v.id);
  }
  for (const auto& l : lambdas) {
    if (l.imag() == 0.0) {
      throw Error(ErrorCode::NonRealRequired, fmt::format("probe lambda {} is real", l.real()));
    }
  }
}

void ResidualTable::summarize() {
  summary = {};
  std::size_t pairs = 0, monotone = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bool last_in_group = i + 1 == rows.size() || rows[i + 1].probe_id != rows[i].probe_id ||
                               rows[i + 1].lambda != rows[i].lambda;
    if (last_in_group) {
      summary.max_final_residual = std::max(summary.max_final_residual, rows[i].residual);
    } else {
      ++pairs;
      if (rows[i + 1].residual <= rows[i].residual) ++monotone;
    }
  }
  summary.monotone_fraction = pairs == 0 ? 1.0 : static_cast<double>(monotone) / static_cast<double>(pairs);
}

namespace {

void check_schedule(std::span<const std::size_t> schedule) {
  RunConfig c;
  c.schedule.assign(schedule.begin(), schedule.end());
  c.validate();
}

std::vector<EigenDecomposition> factor_schedule(const SpectralModel& model,
                                                std::span<const std::size_t> schedule) {
  std::vector<EigenDecomposition> eigs(schedule.size());
  detail::parallel_for_desc(schedule.size(), [&](std::size_t i) { eigs[i] = eig_sym(truncate(model, schedule[i])); });
  return eigs;
}

double complex_distance(std::span<const cplx> a, std::span<const cplx> b) {
  const std::size_t n = std::max(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx d = (i < a.size() ? a[i] : cplx{}) - (i < b.size() ? b[i] : cplx{});
    sum += std::norm(d);
  }
  return std::sqrt(sum);
}

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0, comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct TailSum {
  double sum = 0.0;
  double bound = 0.0;  // upper bound on the omitted remainder
};

// sum_{k > n} |u_k|^2 / |lambda - lambda_k|^2 for a diagonal rule.
TailSum diagonal_resolvent_tail(const DiagonalRule& rule, const CoeffVector& u, cplx lambda,
                                std::size_t n, double prefix_sq) {
  TailSum out;
  CompensatedSum acc;
  const std::size_t explicit_len =
      u.finitely_supported() ? u.coeffs().size() : std::max(u.coeffs().size(), rule.prefix.size());
  for (std::size_t k = n + 1; k <= explicit_len; ++k) {
    acc.add(std::norm(u.at(k)) / std::norm(lambda - rule.eigenvalue(k)));
  }
  if (u.finitely_supported()) {
    out.sum = acc.value();
    return out;
  }

  const double c2 = u.tail()->scale * u.tail()->scale;
  const double two_p = 2.0 * u.tail()->power;
  const std::size_t start = std::max(n, explicit_len) + 1;
  if (rule.tail_scale == 0.0 || rule.tail_power == 0.0) {
    // lambda_k is constant on the tail, so the sum is a scaled Hurwitz zeta.
    const double lam_tail = rule.tail_power == 0.0 ? rule.tail_scale : 0.0;
    acc.add(c2 * power_sum_from(two_p, start) / std::norm(lambda - lam_tail));
    out.sum = acc.value();
    return out;
  }

  constexpr std::size_t kMaxTerms = std::size_t{1} << 22;
  const double a = std::abs(rule.tail_scale), q = rule.tail_power;
  const double im2 = lambda.imag() * lambda.imag();
  std::size_t k = start;
  std::size_t limit = start + 1024;
  while (true) {
    for (; k <= limit; ++k) {
      acc.add(std::norm(u.at(k)) / std::norm(lambda - rule.eigenvalue(k)));
    }
    // For j > limit: |lambda - lambda_j| >= |Im lambda| and, on growing tails,
    // >= |lambda_j| - |lambda|.
    double denom = im2;
    const double grow = a * std::pow(static_cast<double>(limit + 1), q) - std::abs(lambda);
    if (q > 0.0 && grow > 0.0) denom = std::max(denom, grow * grow);
    out.bound = c2 * power_sum_from(two_p, limit + 1) / denom;
    const double total = prefix_sq + acc.value();
    const double err = std::sqrt(total + out.bound) - std::sqrt(total);
    if (err <= 1e-3 * std::sqrt(total) || limit >= kMaxTerms) break;
    limit *= 2;
  }
  out.sum = acc.value();
  return out;
}

// (lambda I - A_N)^{-1} P_N u for a Jacobi rule by banded LU with partial pivoting.
std::vector<cplx> jacobi_reference_solve(const JacobiRule& rule, const CoeffVector& u, cplx lambda,
                                         std::size_t big_n) {
  std::vector<cplx> dl(big_n - 1), d(big_n), du(big_n - 1), w(big_n);
  for (std::size_t k = 1; k <= big_n; ++k) {
    d[k - 1] = lambda - rule.diag(k);
    w[k - 1] = u.at(k);
  }
  for (std::size_t k = 1; k < big_n; ++k) {
    dl[k - 1] = -rule.off(k);
    du[k - 1] = dl[k - 1];
  }
  const lapack_int info = LAPACKE_zgtsv(LAPACK_COL_MAJOR, static_cast<lapack_int>(big_n), 1, dl.data(),
                                        d.data(), du.data(), w.data(), static_cast<lapack_int>(big_n));
  if (info != 0) {
    throw Error(ErrorCode::ReferenceUnavailable, fmt::format("reference tridiagonal solve failed (info {})", info));
  }
  return w;
}

double tail_mass_estimate(const JacobiRule& rule, const CoeffVector& u, cplx lambda,
                          std::span<const cplx> w) {
  const std::size_t big_n = w.size();
  const double im = std::abs(lambda.imag());
  // Coupling across the cut plus whatever of u lies beyond it.
  const double boundary = (std::abs(rule.off(big_n)) + 1.0) * std::abs(w.back()) / im;
  return 2.0 * boundary + std::sqrt(u.tail_norm_sq(big_n)) / im;
}

}  // namespace

ResidualTable check_resolvent_consistency(const SpectralModel& model, const ProbeSet& probes,
                                          std::span<const std::size_t> schedule) {
  probes.validate();
  check_schedule(schedule);
  ResidualTable table;
  table.suite = "resolvent";
  const auto eigs = factor_schedule(model, schedule);
  const std::size_t count = schedule.size();
  const std::size_t max_n = schedule.back();

  for (const auto& probe : probes.vectors) {
    for (const cplx lambda : probes.lambdas) {
      std::vector<std::vector<cplx>> computed(count);
      detail::parallel_for_desc(count, [&](std::size_t i) {
        computed[i] = resolvent_apply(eigs[i], lambda, probe.vector.head(schedule[i]));
      });

      std::vector<double> residuals(count);
      double ref_err = 0.0;
      if (const auto* rule = model.diagonal()) {
        for (std::size_t i = 0; i < count; ++i) {
          const std::size_t n = schedule[i];
          double prefix_sq = 0.0;
          for (std::size_t k = 1; k <= n; ++k) {
            const cplx ref = probe.vector.at(k) * (1.0 / (lambda - rule->eigenvalue(k)));
            prefix_sq += std::norm(computed[i][k - 1] - ref);
          }
          const TailSum tail = diagonal_resolvent_tail(*rule, probe.vector, lambda, n, prefix_sq);
          const double total = prefix_sq + tail.sum;
          residuals[i] = std::sqrt(total);
          const double err = std::sqrt(total + tail.bound) - residuals[i];
          if (err > 0.1 * residuals[i] && err > 0.0) {
            throw Error(ErrorCode::ReferenceUnavailable,
                        fmt::format("probe {} at n = {}: tail sum error {:.3g} vs residual {:.3g}", probe.id, n,
                                    err, residuals[i]));
          }
          ref_err = std::max(ref_err, err);
        }
      } else {
        const auto& jrule = *model.jacobi();
        if (!probe.vector.finitely_supported() && probe.vector.tail()->power <= 0.5) {
          throw Error(ErrorCode::ReferenceUnavailable, "probe tail is not square summable");
        }
        constexpr std::size_t kMaxReference = std::size_t{1} << 20;
        std::size_t big_n = std::max(4 * max_n, probe.vector.coeffs().size() + 2);
        while (true) {
          const auto w = jacobi_reference_solve(jrule, probe.vector, lambda, big_n);
          double smallest = 0.0, wnorm = 0.0;
          for (const auto& v : w) wnorm += std::norm(v);
          wnorm = std::sqrt(wnorm);
          for (std::size_t i = 0; i < count; ++i) {
            residuals[i] = complex_distance(computed[i], w);
            if (residuals[i] > 0.0 && (smallest == 0.0 || residuals[i] < smallest)) smallest = residuals[i];
          }
          const double est = tail_mass_estimate(jrule, probe.vector, lambda, w);
          if (est <= std::max(0.1 * smallest, 1e-14 * wnorm)) {
            ref_err = est;
            break;
          }
          if (big_n >= kMaxReference) {
            throw Error(ErrorCode::ReferenceUnavailable,
                        fmt::format("probe {}: reference truncation N = {} leaves tail-mass estimate {:.3g} "
                                    "above 1/10 of the smallest residual {:.3g}",
                                    probe.id, big_n, est, smallest));
          }
          big_n *= 2;
        }
      }
      table.reference_error = std::max(table.reference_error, ref_err);
      for (std::size_t i = 0; i < count; ++i) {
        table.rows.push_back({schedule[i], probe.id, lambda, residuals[i]});
      }
    }
  }
  table.summarize();
  return table;
}

ResidualTable check_graph_convergence(const SpectralModel& model, const ProbeSet& probes,
                                      std::span<const std::size_t> schedule) {
  probes.validate();
  check_schedule(schedule);
  for (const auto& p : probes.vectors) {
    if (!p.vector.finitely_supported()) {
      throw Error(ErrorCode::DomainViolation, "graph convergence probe " + p.id + " is not finitely supported");
    }
    if (!in_domain(model, p.vector)) {
      throw Error(ErrorCode::DomainViolation, "graph convergence probe " + p.id + " is outside D(A)");
    }
  }
  ResidualTable table;
  table.suite = "graph";
  const auto eigs = factor_schedule(model, schedule);
  const std::size_t count = schedule.size();
  const cplx lift_shift(0.0, 1.0);

  for (const auto& probe : probes.vectors) {
    const CoeffVector au = apply(model, probe.vector);
    std::vector<std::optional<double>> residuals(count);
    std::vector<std::string> skipped(count);
    detail::parallel_for_desc(count, [&](std::size_t i) {
      const std::size_t n = schedule[i];
      try {
        const auto lift = graph_lift_values(model, probe.vector, eigs[i]);
        const SymMatrix an = truncate(model, n);
        std::vector<double> re(n), im(n);
        for (std::size_t k = 0; k < n; ++k) {
          re[k] = lift[k].real();
          im[k] = lift[k].imag();
        }
        const auto an_re = multiply(an, re);
        const auto an_im = multiply(an, im);
        std::vector<cplx> an_lift(n);
        for (std::size_t k = 0; k < n; ++k) an_lift[k] = cplx(an_re[k], an_im[k]);
        std::vector<cplx> u_c, au_c;
        for (double v : probe.vector.coeffs()) u_c.emplace_back(v, 0.0);
        for (double v : au.coeffs()) au_c.emplace_back(v, 0.0);
        residuals[i] = complex_distance(lift, u_c) + complex_distance(an_lift, au_c);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TruncationTooSmall) throw;
        skipped[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < count; ++i) {
      if (residuals[i]) {
        table.rows.push_back({schedule[i], probe.id, lift_shift, *residuals[i]});
      } else {
        table.skipped.push_back({schedule[i], probe.id, skipped[i]});
      }
    }
  }
  table.summarize();
  return table;
}

ResidualTable check_projection_convergence(const SpectralModel& model, const ProbeSet& probes,
                                           std::span<const std::size_t> schedule,
                                           const RunConfig& config) {
  if (model.kind() != ModelKind::Diagonal) {
    throw Error(ErrorCode::UnsupportedModel,
                fmt::format("projection convergence needs an analytic kernel; {} has none", model.rule_description()));
  }
  probes.validate();
  check_schedule(schedule);
  ResidualTable table;
  table.suite = "projection";
  const auto eigs = factor_schedule(model, schedule);
  const std::size_t count = schedule.size();

  for (const auto& probe : probes.vectors) {
    const CoeffVector ref_kernel = oracle_kernel_projection(model, probe.vector);
    const CoeffVector ref_range = oracle_range_projection(model, probe.vector);
    std::vector<double> kernel_res(count), range_res(count);
    detail::parallel_for_desc(count, [&](std::size_t i) {
      const std::size_t n = schedule[i];
      const RankCut cut = select_rank(eigs[i], config.tolerance_for(model, n));
      std::vector<double> weights(n);
      for (std::size_t k = 0; k < n; ++k) weights[k] = cut.retained[k] ? 1.0 : 0.0;
      const std::vector<double> xn = probe.vector.head(n);
      std::vector<double> range(n);
      kernels::omp::spectral_apply(eigs[i].vectors, weights, xn, n, range);
      std::vector<double> kernel(n);
      for (std::size_t k = 0; k < n; ++k) kernel[k] = xn[k] - range[k];

      const auto rk = ref_kernel.head(n);
      const auto rr = ref_range.head(n);
      double ks = 0.0, rs = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        ks += (kernel[k] - rk[k]) * (kernel[k] - rk[k]);
        rs += (range[k] - rr[k]) * (range[k] - rr[k]);
      }
      kernel_res[i] = std::sqrt(ks + ref_kernel.tail_norm_sq(n));
      range_res[i] = std::sqrt(rs + ref_range.tail_norm_sq(n));
    });
    for (std::size_t i = 0; i < count; ++i) {
      table.rows.push_back({schedule[i], probe.id + ":kernel", std::nullopt, kernel_res[i]});
    }
    for (std::size_t i = 0; i < count; ++i) {
      table.rows.push_back({schedule[i], probe.id + ":range", std::nullopt, range_res[i]});
    }
  }
  table.summarize();
  return table;
}

ResidualTable check_moving_target(const SpectralModel& model, const CoeffVector& y,
                                  double perturbation_scale, std::span<const std::size_t> schedule) {
  check_schedule(schedule);
  if (!(perturbation_scale >= 0.0) || !std::isfinite(perturbation_scale)) {
    throw Error(ErrorCode::InvalidArgument, "perturbation scale must be finite and non-negative");
  }
  if (!y.finitely_supported()) {
    throw Error(ErrorCode::DomainViolation, "moving-target data must be finitely supported");
  }
  if (!in_domain(model, y)) throw Error(ErrorCode::DomainViolation, "moving-target data is outside D(A)");

  ResidualTable table;
  table.suite = "moving-target";
  const CoeffVector ay = apply(model, y);
  const bool bounded = model.bounded();
  const std::size_t count = schedule.size();
  std::vector<std::optional<double>> residuals(count);
  std::vector<std::string> skipped(count);

  detail::parallel_for_desc(count, [&](std::size_t i) {
    const std::size_t n = schedule[i];
    try {
      const SymMatrix an = truncate(model, n);
      std::vector<double> base;
      if (bounded) {
        base = y.head(n);
      } else {
        const CoeffVector lift = graph_lift(model, y, n);
        base = lift.head(n);
      }
      // A_n y_n - A y, split as (A_n base - A y) + (scale / n) A_n e_1.
      std::vector<double> diff = multiply(an, base);
      const auto ay_head = ay.head(std::max(n, ay.coeffs().size()));
      diff.resize(ay_head.size(), 0.0);
      for (std::size_t k = 0; k < ay_head.size(); ++k) diff[k] -= ay_head[k];
      const double step = perturbation_scale / static_cast<double>(n);
      double sq = 0.0;
      for (std::size_t k = 0; k < diff.size(); ++k) {
        const double v = diff[k] + (k < n ? step * an(k, 0) : 0.0);
        sq += v * v;
      }
      residuals[i] = std::sqrt(sq);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TruncationTooSmall) throw;
      skipped[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < count; ++i) {
    if (residuals[i]) {
      table.rows.push_back({schedule[i], "y", std::nullopt, *residuals[i]});
    } else {
      table.skipped.push_back({schedule[i], "y", skipped[i]});
    }
  }
  table.summarize();
  return table;
}

double MpIdentityResiduals::max_residual() const {
  return std::max({penrose_apa, penrose_pap, penrose_ap_sym, penrose_pa_sym, ap_minus_range, pa_minus_range,
                   kernel_of_pinv});
}

MpIdentityResiduals check_mp_identities(const SymMatrix& a, const ToleranceContext& tol) {
  const std::size_t n = a.dim();
  const auto eig = eig_sym(a);
  const PinvResult p = pinv(eig, tol);
  const SymMatrix pr = proj_range(eig, tol);
  const SymMatrix pk = proj_kernel(eig, tol);

  const auto ap = multiply(a, p.matrix);
  const auto pa = multiply(p.matrix, a);
  std::vector<double> apa(n * n), pap(n * n), pkp(n * n);
  kernels::omp::matmul(ap, a.data(), n, apa);
  kernels::omp::matmul(pa, p.matrix.data(), n, pap);
  kernels::omp::matmul(pk.data(), p.matrix.data(), n, pkp);

  std::vector<double> d(n * n);
  auto diff_norm = [&](auto&& entry) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] = entry(i, j);
    }
    return frobenius(d);
  };

  MpIdentityResiduals r;
  r.penrose_apa = diff_norm([&](std::size_t i, std::size_t j) { return apa[i * n + j] - a(i, j); });
  r.penrose_pap = diff_norm([&](std::size_t i, std::size_t j) { return pap[i * n + j] - p.matrix(i, j); });
  r.penrose_ap_sym = diff_norm([&](std::size_t i, std::size_t j) { return ap[j * n + i] - ap[i * n + j]; });
  r.penrose_pa_sym = diff_norm([&](std::size_t i, std::size_t j) { return pa[j * n + i] - pa[i * n + j]; });
  r.ap_minus_range = diff_norm([&](std::size_t i, std::size_t j) { return ap[i * n + j] - pr(i, j); });
  r.pa_minus_range = diff_norm([&](std::size_t i, std::size_t j) { return pa[i * n + j] - pr(i, j); });
  r.kernel_of_pinv = frobenius(pkp);
  double spectral_radius = 0.0;
  for (double v : eig.values) spectral_radius = std::max(spectral_radius, std::abs(v));
  r.norm_a = spectral_radius;
  r.norm_pinv = p.norm;
  r.rank = p.rank;
  return r;
}

ResidualTable mp_identity_table(const SpectralModel& model, std::span<const std::size_t> schedule,
                                const RunConfig& config) {
  check_schedule(schedule);
  ResidualTable table;
  table.suite = "mp-identities";
  const std::size_t count = schedule.size();
  std::vector<MpIdentityResiduals> res(count);
  for (std::size_t i = 0; i < count; ++i) {
    res[i] = check_mp_identities(truncate(model, schedule[i]), config.tolerance_for(model, schedule[i]));
  }
  const std::pair<const char*, double MpIdentityResiduals::*> fields[] = {
      {"penrose_apa", &MpIdentityResiduals::penrose_apa},
      {"penrose_pap", &MpIdentityResiduals::penrose_pap},
      {"penrose_ap_sym", &MpIdentityResiduals::penrose_ap_sym},
      {"penrose_pa_sym", &MpIdentityResiduals::penrose_pa_sym},
      {"ap_minus_range", &MpIdentityResiduals::ap_minus_range},
      {"pa_minus_range", &MpIdentityResiduals::pa_minus_range},
      {"kernel_of_pinv", &MpIdentityResiduals::kernel_of_pinv},
  };
  for (const auto& [name, member] : fields) {
    for (std::size_t i = 0; i < count; ++i) table.rows.push_back({schedule[i], name, std::nullopt, res[i].*member});
  }
  table.summarize();
  return table;
}

}  // namespace gpinv
