#pragma once

// Experiment configuration: flat `key = value` text with dotted sections.
//
//   model.name = linear                 # built-in gallery entry, or:
//   model.kind = diagonal               # diagonal | jacobi
//   model.rule = custom                 # linear | harmonic | kernel_gap | custom
//                                       # free | shifted | custom (jacobi)
//   model.prefix = 0, 1                 # diagonal custom: explicit eigenvalues
//   model.tail_scale = 1                #   lambda_k = tail_scale * k^tail_power
//   model.tail_power = 1
//   model.shift = 3                     # jacobi shifted
//   model.diag_prefix / model.diag_tail / model.off_prefix / model.off_tail
//   model.expected = Stable             # Stable | Unstable | StableWithKernel | Unknown
//   model.label = my_model
//   data.y = [7, 2] + tail(1, 2)        # also e3, tail(c, p)
//   run.schedule = 2, 4, 8
//   run.divergence_threshold / run.plateau_ratio / run.residual_tol
//   run.rank_rel_tol = auto             # or a number
//   run.exact_rank = 3                  # or none
//   run.rank_mode = tolerance           # tolerance | analytic
//   run.diagnostics = resolvent, graph  # suites attached to `run` reports
//   probe.vectors = e1; e2; pow2: tail(1, 2)
//   probe.lambdas = i, 2i, 1+i
//   probe.perturbation_scale = 1
//   check.final_tol = 1e-6
//   output.path = report.csv
//   output.format = csv                 # csv | json

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gpinv/coeff_vector.hpp"
#include "gpinv/diagnostics.hpp"
#include "gpinv/engine.hpp"
#include "gpinv/gallery.hpp"

namespace gpinv {

enum class ReportFormat { Csv, Json };

struct OutputSpec {
  std::string path;  // empty: no file written
  ReportFormat format = ReportFormat::Csv;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

struct ExperimentConfig {
  SpectralModel model = *find_builtin("linear");
  bool builtin_model = true;
  CoeffVector y = CoeffVector::basis(1);
  RunConfig run;
  std::vector<std::string> run_diagnostics;
  ProbeSet probes = ProbeSet::defaults();
  double perturbation_scale = 1.0;
  double check_tol = 1e-6;
  OutputSpec output;
  std::optional<std::size_t> schedule_cap;

  // Every effective setting, defaults included, in config syntax and a fixed
  // key order. Parsing the result reproduces the same configuration.
  KeyValues effective() const;
};

// Throws ConfigInvalid naming the offending key. `schedule_cap` drops
// schedule entries above it.
ExperimentConfig parse_config(std::string_view text, std::optional<std::size_t> schedule_cap = std::nullopt);
// Reads the file; the cap comes from TOOL_SCHEDULE_MAX when set.
ExperimentConfig load_config(const std::filesystem::path& path);

std::optional<std::size_t> schedule_cap_from_env();

// Literal syntax shared by config files and reports.
CoeffVector parse_vector_literal(std::string_view text);
std::string format_vector_literal(const CoeffVector& v);
cplx parse_complex_literal(std::string_view text);
std::string format_complex_literal(cplx z);
std::string format_number(double v);

inline constexpr std::string_view kSuites[] = {"resolvent", "graph", "projection", "moving-target",
                                               "mp-identities"};

}  // namespace gpinv
