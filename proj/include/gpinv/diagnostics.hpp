#pragma once

// Finite-n evidence for the convergence statements behind the scheme:
// strong resolvent convergence, graph convergence via the explicit lift,
// moving-target convergence, kernel/range projection convergence, and the
// Moore-Penrose structural identities of each truncation.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpinv/coeff_vector.hpp"
#include "gpinv/engine.hpp"
#include "gpinv/gallery.hpp"
#include "gpinv/linalg.hpp"

namespace gpinv {

struct Probe {
  std::string id;
  CoeffVector vector;
};

struct ProbeSet {
  std::vector<Probe> vectors;
  std::vector<cplx> lambdas;

  // e1, e2, e3 and the k^-3 tail; lambdas {i, 2i, 1+i}.
  static ProbeSet defaults();
  ProbeSet finite_only() const;
  // NonRealRequired for a real lambda, InvalidArgument for duplicate ids.
  void validate() const;
};

struct ResidualRow {
  std::size_t n = 0;
  std::string probe_id;
  std::optional<cplx> lambda;
  double residual = 0.0;
};

struct SkippedPoint {
  std::size_t n = 0;
  std::string probe_id;
  std::string reason;
};

struct ResidualSummary {
  // Max over (probe, lambda) groups of the residual at the group's largest n.
  double max_final_residual = 0.0;
  // Fraction of consecutive pairs within a group that do not increase.
  double monotone_fraction = 1.0;
};

struct ResidualTable {
  std::string suite;
  std::vector<ResidualRow> rows;  // grouped by (probe, lambda), n ascending inside a group
  std::vector<SkippedPoint> skipped;
  ResidualSummary summary;
  // Largest estimated error of the reference values (0 when exact).
  double reference_error = 0.0;

  void summarize();
};

ResidualTable check_resolvent_consistency(const SpectralModel& model, const ProbeSet& probes,
                                          std::span<const std::size_t> schedule);

ResidualTable check_graph_convergence(const SpectralModel& model, const ProbeSet& probes,
                                      std::span<const std::size_t> schedule);

ResidualTable check_projection_convergence(const SpectralModel& model, const ProbeSet& probes,
                                           std::span<const std::size_t> schedule,
                                           const RunConfig& config = {});

// y_n = base_n + (scale / n) e_1 with base_n = P_n y for bounded models and
// the graph lift of y for unbounded ones; residual ||A_n y_n - A y||.
ResidualTable check_moving_target(const SpectralModel& model, const CoeffVector& y,
                                  double perturbation_scale, std::span<const std::size_t> schedule);

struct MpIdentityResiduals {
  double penrose_apa = 0.0;       // ||A P A - A||
  double penrose_pap = 0.0;       // ||P A P - P||
  double penrose_ap_sym = 0.0;    // ||(A P)^T - A P||
  double penrose_pa_sym = 0.0;    // ||(P A)^T - P A||
  double ap_minus_range = 0.0;    // ||A P - P_R||
  double pa_minus_range = 0.0;    // ||P A - P_R||
  double kernel_of_pinv = 0.0;    // ||P_N P||
  double norm_a = 0.0;
  double norm_pinv = 0.0;
  std::size_t rank = 0;

  double max_residual() const;
};

// Frobenius-norm residuals (an upper bound on the operator norm).
MpIdentityResiduals check_mp_identities(const SymMatrix& a, const ToleranceContext& tol = {});

// check_mp_identities on every truncation of the schedule; one row per identity.
ResidualTable mp_identity_table(const SpectralModel& model, std::span<const std::size_t> schedule,
                                const RunConfig& config = {});

}  // namespace gpinv
