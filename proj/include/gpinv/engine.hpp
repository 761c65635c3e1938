#pragma once

// Runs the finite-section scheme x_n = pinv(A_n) P_n y over a schedule of
// truncation sizes, tracks sup_n ||pinv(A_n)|| and classifies the run.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gpinv/coeff_vector.hpp"
#include "gpinv/error.hpp"
#include "gpinv/gallery.hpp"
#include "gpinv/linalg.hpp"

namespace gpinv {

enum class Verdict { Convergent, Divergent, Inconclusive };
std::string_view to_string(Verdict v) noexcept;

// How the rank of each A_n is decided.
enum class RankMode {
  Tolerance,  // ToleranceContext as given
  Analytic,   // exact_rank = n - dim N(A_n) from the model's closed form
};
std::string_view to_string(RankMode m) noexcept;

std::vector<std::size_t> default_schedule();  // 2, 4, ..., 1024

struct RunConfig {
  std::vector<std::size_t> schedule = default_schedule();
  double divergence_threshold = 1e8;
  double plateau_ratio = 1.5;
  double residual_tol = 1e-6;
  ToleranceContext tolerance;
  RankMode rank_mode = RankMode::Tolerance;

  // Throws ConfigInvalid naming the offending field.
  void validate() const;
  // Tolerance used for the truncation of size n of `model`.
  ToleranceContext tolerance_for(const SpectralModel& model, std::size_t n) const;
};

struct StabilityRecord {
  std::size_t n = 0;
  double pinv_norm = 0.0;
  double running_sup = 0.0;
};

struct StabilityTrace {
  std::vector<StabilityRecord> records;

  // Builds records with running_sup as the prefix maximum; input sorted by n.
  static StabilityTrace from_norms(std::span<const std::size_t> ns, std::span<const double> norms);
};

struct IterateRecord {
  std::size_t n = 0;
  std::vector<double> x;  // x_n in coordinates e_1..e_n
  std::size_t rank = 0;
  std::optional<double> oracle_err;
  double cauchy_gap = 0.0;  // ||x_n - x_prev||, x_prev = 0 for the first record
};

struct ScheduleFailure {
  std::size_t n = 0;
  ErrorCode code = ErrorCode::InvalidArgument;
  std::string message;
};

struct VerdictResult {
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
};

struct BestApproxRun {
  StabilityTrace trace;
  std::vector<IterateRecord> iterates;
  std::vector<ScheduleFailure> failures;
  Verdict verdict = Verdict::Inconclusive;
  std::string verdict_reason;
  std::string oracle_note;  // empty when no oracle applies
};

VerdictResult stability_classify(const StabilityTrace& trace, const RunConfig& config);

BestApproxRun run_best_approx(const SpectralModel& model, const CoeffVector& y,
                              const RunConfig& config);

// u_n = (iI - A_n)^{-1} P_n (iI - A) u for finitely supported u in D(A).
// Throws TruncationTooSmall when P_n would cut (iI - A) u.
std::vector<cplx> graph_lift_values(const SpectralModel& model, const CoeffVector& u,
                                    const EigenDecomposition& eig_n);
std::vector<cplx> graph_lift_values(const SpectralModel& model, const CoeffVector& u, std::size_t n);
// Real part of the lift; the imaginary part vanishes up to rounding.
CoeffVector graph_lift(const SpectralModel& model, const CoeffVector& u, std::size_t n);

}  // namespace gpinv
