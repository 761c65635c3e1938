#include "gpinv/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "parallel.hpp"

namespace gpinv {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Convergent: return "Convergent";
    case Verdict::Divergent: return "Divergent";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::string_view to_string(RankMode m) noexcept {
  return m == RankMode::Tolerance ? "tolerance" : "analytic";
}

std::vector<std::size_t> default_schedule() {
  std::vector<std::size_t> s;
  for (std::size_t n = 2; n <= 1024; n *= 2) s.push_back(n);
  return s;
}

void RunConfig::validate() const {
  if (schedule.empty()) throw Error(ErrorCode::ConfigInvalid, "run.schedule: must be nonempty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] == 0) throw Error(ErrorCode::ConfigInvalid, "run.schedule: entries must be positive");
    if (i > 0 && schedule[i] <= schedule[i - 1]) {
      throw Error(ErrorCode::ConfigInvalid,
                  fmt::format("run.schedule: non-increasing schedule ({} follows {}); must be strictly increasing",
                              schedule[i], schedule[i - 1]));
    }
  }
  auto positive = [](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::ConfigInvalid, fmt::format("{}: must be a positive finite number", field));
    }
  };
  positive(divergence_threshold, "run.divergence_threshold");
  positive(plateau_ratio, "run.plateau_ratio");
  positive(residual_tol, "run.residual_tol");
  if (tolerance.rank_rel_tol < 0.0 || !std::isfinite(tolerance.rank_rel_tol)) {
    throw Error(ErrorCode::ConfigInvalid, "run.rank_rel_tol: must be positive");
  }
  if (tolerance.exact_rank && rank_mode == RankMode::Analytic) {
    throw Error(ErrorCode::ConfigInvalid, "run.exact_rank: cannot be combined with run.rank_mode = analytic");
  }
}

ToleranceContext RunConfig::tolerance_for(const SpectralModel& model, std::size_t n) const {
  ToleranceContext tol = tolerance;
  if (rank_mode == RankMode::Analytic) {
    const auto kernel = model.truncation_kernel_dim(n);
    if (!kernel) {
      throw Error(ErrorCode::UnsupportedModel,
                  fmt::format("run.rank_mode: no analytic kernel dimension for {}", model.rule_description()));
    }
    tol.exact_rank = n - *kernel;
  }
  return tol;
}

StabilityTrace StabilityTrace::from_norms(std::span<const std::size_t> ns, std::span<const double> norms) {
  StabilityTrace t;
  double sup = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    sup = std::max(sup, norms[i]);
    t.records.push_back({ns[i], norms[i], sup});
  }
  return t;
}

VerdictResult stability_classify(const StabilityTrace& trace, const RunConfig& config) {
  const auto& r = trace.records;
  const std::size_t m = r.size();
  if (m == 0) return {Verdict::Inconclusive, "no successful schedule points"};

  const double final_sup = r.back().running_sup;
  if (final_sup > config.divergence_threshold) {
    return {Verdict::Divergent, fmt::format("sup ||A_n^+|| = {:.6g} exceeds divergence threshold {:.6g}",
                                            final_sup, config.divergence_threshold)};
  }

  // Growth of the running supremum from the end of the first quarter of the
  // schedule to its end. A zero supremum (rank-0 truncations) carries no
  // scale, so the first positive value stands in.
  const std::size_t quarter = std::max<std::size_t>(1, m / 4);
  double base = r[quarter - 1].running_sup;
  std::size_t base_n = r[quarter - 1].n;
  if (base == 0.0) {
    for (const auto& rec : r) {
      if (rec.running_sup > 0.0) {
        base = rec.running_sup;
        base_n = rec.n;
        break;
      }
    }
  }
  if (base > 0.0 && final_sup / base >= 10.0) {
    return {Verdict::Divergent, fmt::format("sup ||A_n^+|| grew by {:.6g} from n = {} to n = {}",
                                            final_sup / base, base_n, r.back().n)};
  }

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = m / 2; i < m; ++i) {
    lo = std::min(lo, r[i].pinv_norm);
    hi = std::max(hi, r[i].pinv_norm);
  }
  const double ratio = hi == 0.0 ? 1.0 : (lo == 0.0 ? std::numeric_limits<double>::infinity() : hi / lo);
  if (ratio <= config.plateau_ratio) {
    return {Verdict::Convergent,
            fmt::format("stable: sup ||A_n^+|| = {:.6g}, last-half max/min = {:.6g}", final_sup, ratio)};
  }
  return {Verdict::Inconclusive,
          fmt::format("bounded (sup {:.6g}) but last-half max/min = {:.6g} exceeds plateau ratio {:.6g}",
                      final_sup, ratio, config.plateau_ratio)};
}

namespace {

struct PointResult {
  bool ok = false;
  double norm = 0.0;
  std::size_t rank = 0;
  std::vector<double> x;
  ScheduleFailure failure;
};

PointResult solve_point(const SpectralModel& model, const CoeffVector& y, const RunConfig& config,
                        std::size_t n) {
  PointResult out;
  const SymMatrix a = truncate(model, n);
  const PinvResult p = pinv(eig_sym(a), config.tolerance_for(model, n));
  const std::vector<double> yn = y.head(n);
  out.x = multiply(p.matrix, yn);
  out.norm = p.norm;
  out.rank = p.rank;
  out.ok = true;
  return out;
}

}  // namespace

BestApproxRun run_best_approx(const SpectralModel& model, const CoeffVector& y,
                              const RunConfig& config) {
  config.validate();
  const auto& schedule = config.schedule;
  const std::size_t count = schedule.size();
  std::vector<PointResult> points(count);
  detail::parallel_for_desc(count, [&](std::size_t i) {
    try {
      points[i] = solve_point(model, y, config, schedule[i]);
    } catch (const Error& e) {
      points[i].failure = {schedule[i], e.code(), e.what()};
    }
  });

  BestApproxRun run;
  std::vector<std::size_t> ns;
  std::vector<double> norms;
  for (std::size_t i = 0; i < count; ++i) {
    if (!points[i].ok) {
      run.failures.push_back(points[i].failure);
      continue;
    }
    ns.push_back(schedule[i]);
    norms.push_back(points[i].norm);
  }
  run.trace = StabilityTrace::from_norms(ns, norms);

  std::optional<CoeffVector> oracle;
  if (model.kind() == ModelKind::Diagonal) {
    OracleAnswer ans = oracle_pinv_apply(model, y);
    run.oracle_note = ans.description;
    if (ans.exact && ans.value) oracle = std::move(ans.value);
  }

  run.iterates.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!points[i].ok) continue;
    IterateRecord rec;
    rec.n = schedule[i];
    rec.x = std::move(points[i].x);
    rec.rank = points[i].rank;
    rec.cauchy_gap = run.iterates.empty() ? norm2(rec.x) : padded_distance(rec.x, run.iterates.back().x);
    if (oracle) {
      const std::vector<double> head = oracle->head(rec.n);
      double sq = 0.0;
      for (std::size_t k = 0; k < rec.n; ++k) sq += (rec.x[k] - head[k]) * (rec.x[k] - head[k]);
      rec.oracle_err = std::sqrt(sq + oracle->tail_norm_sq(rec.n));
    }
    run.iterates.push_back(std::move(rec));
  }

  VerdictResult v = stability_classify(run.trace, config);
  if (v.verdict == Verdict::Convergent) {
    const double gap = run.iterates.back().cauchy_gap;
    if (run.iterates.size() < 2 || !(gap < config.residual_tol)) {
      v = {Verdict::Inconclusive,
           fmt::format("{}; but final Cauchy gap {:.6g} is not below residual_tol {:.6g}", v.reason, gap,
                       config.residual_tol)};
    } else {
      v.reason += fmt::format("; final Cauchy gap {:.6g}", gap);
    }
  }
  run.verdict = v.verdict;
  run.verdict_reason = std::move(v.reason);
  if (!run.failures.empty()) {
    run.verdict_reason += fmt::format(" ({} schedule point(s) failed)", run.failures.size());
  }
  return run;
}

std::vector<cplx> graph_lift_values(const SpectralModel& model, const CoeffVector& u,
                                    const EigenDecomposition& eig_n) {
  const std::size_t n = eig_n.dim;
  if (!u.finitely_supported()) {
    throw Error(ErrorCode::TruncationTooSmall, "graph lift needs a finitely supported vector");
  }
  if (!in_domain(model, u)) throw Error(ErrorCode::DomainViolation, "graph lift: u is outside D(A)");
  const CoeffVector au = apply(model, u);
  const std::size_t reach = std::max(u.support(), au.support());
  if (reach > n) {
    throw Error(ErrorCode::TruncationTooSmall,
                fmt::format("P_n with n = {} drops coordinates of (iI - A)u up to index {}", n, reach));
  }
  // (iI - A)u = (iI - A_n)P_n u + (A_n P_n u - P_n A u), so
  // u_n = P_n u + R_i(A_n) d with a real defect d.
  const std::vector<double> un = u.head(n);
  std::vector<double> defect = multiply(truncate(model, n), un);
  const std::vector<double> au_n = au.head(n);
  for (std::size_t k = 0; k < n; ++k) defect[k] -= au_n[k];
  const auto correction = resolvent_apply(eig_n, cplx(0.0, 1.0), defect);
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = un[k] + correction[k];
  return out;
}

std::vector<cplx> graph_lift_values(const SpectralModel& model, const CoeffVector& u, std::size_t n) {
  return graph_lift_values(model, u, eig_sym(truncate(model, n)));
}

CoeffVector graph_lift(const SpectralModel& model, const CoeffVector& u, std::size_t n) {
  const auto values = graph_lift_values(model, u, n);
  std::vector<double> re(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) re[k] = values[k].real();
  return CoeffVector(std::move(re));
}

}  // namespace gpinv
