#include "gpinv/commands.hpp"

#include <algorithm>
#include <cctype>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gpinv/error.hpp"

namespace gpinv {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

void apply_options(ExperimentConfig& cfg, const CommandOptions& options) {
  if (options.out_path) cfg.output.path = *options.out_path;
  if (options.format) cfg.output.format = *options.format;
}

void emit(const Report& report, const OutputSpec& spec, std::ostream& out) {
  if (spec.path.empty()) {
    if (spec.format == ReportFormat::Csv) render_csv(report, out);
    else render_json(report, out);
  } else {
    write_report(report, spec);
  }
}

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::Convergent: return 0;
    case Verdict::Divergent: return 2;
    case Verdict::Inconclusive: return 3;
  }
  return 3;
}

}  // namespace

int cmd_gallery_list(std::string_view filter, std::ostream& out) {
  const std::string f = lower(filter);
  for (const auto& m : builtin_gallery()) {
    if (!f.empty() && lower(m.name()).find(f) == std::string::npos &&
        lower(to_string(m.kind())).find(f) == std::string::npos) {
      continue;
    }
    fmt::print(out, "{:<16} {:<48} {}\n", m.name(), m.rule_description(),
               to_string(m.expected()));
  }
  return 0;
}

KeyValues report_metadata(const ExperimentConfig& config, std::string_view command) {
  KeyValues kv;
  kv.emplace_back("tool_version", GPINV_VERSION);
  kv.emplace_back("command", std::string(command));
  kv.emplace_back("model", config.model.name());
  kv.emplace_back("model_rule", config.model.rule_description());
  for (auto& entry : config.effective()) {
    if (entry.first == "output.path") continue;
    kv.push_back(std::move(entry));
  }
  return kv;
}

SuiteOutcome run_suite(std::string_view suite, const ExperimentConfig& config) {
  SuiteOutcome o;
  const auto& schedule = config.run.schedule;
  if (suite == "resolvent") {
    o.table = check_resolvent_consistency(config.model, config.probes, schedule);
    o.threshold = config.check_tol;
  } else if (suite == "graph" || suite == "projection") {
    const ProbeSet finite = config.probes.finite_only();
    if (finite.vectors.empty()) {
      throw Error(ErrorCode::UnsupportedModel, fmt::format("{} suite needs finitely supported probes", suite));
    }
    o.table = suite == "graph" ? check_graph_convergence(config.model, finite, schedule)
                               : check_projection_convergence(config.model, finite, schedule, config.run);
    o.threshold = config.check_tol;
  } else if (suite == "moving-target") {
    o.table = check_moving_target(config.model, config.y, config.perturbation_scale, schedule);
    // The e_1 perturbation contributes exactly (scale / n) ||A_n e_1|| at the last n.
    const std::size_t n_last = o.table.rows.empty() ? schedule.back() : o.table.rows.back().n;
    const double ae1 = apply(config.model, CoeffVector::basis(1)).norm();
    o.threshold = config.check_tol + config.perturbation_scale * ae1 / static_cast<double>(n_last);
  } else if (suite == "mp-identities") {
    o.table = mp_identity_table(config.model, schedule, config.run);
    o.passed = !o.table.rows.empty();
    for (const auto& r : o.table.rows) {
      if (!(r.residual <= 1e-9 * static_cast<double>(r.n))) o.passed = false;
    }
    o.threshold = 1e-9 * static_cast<double>(schedule.back());
    return o;
  } else {
    throw Error(ErrorCode::InvalidArgument, fmt::format("unknown suite '{}'", suite));
  }
  o.passed = !o.table.rows.empty() && o.table.summary.max_final_residual <= o.threshold;
  return o;
}

int cmd_run(const std::filesystem::path& config_path, const CommandOptions& options, std::ostream& out,
            std::ostream& err) {
  try {
    ExperimentConfig cfg = load_config(config_path);
    apply_options(cfg, options);

    Report report;
    report.metadata = report_metadata(cfg, "run");
    BestApproxRun run = run_best_approx(cfg.model, cfg.y, cfg.run);
    for (const auto& suite : cfg.run_diagnostics) report.diagnostics.push_back(run_suite(suite, cfg).table);
    report.verdict = std::string(to_string(run.verdict));
    report.reason = run.verdict_reason;
    if (!run.oracle_note.empty()) report.metadata.emplace_back("oracle", run.oracle_note);
    const Verdict verdict = run.verdict;
    report.run = std::move(run);

    emit(report, cfg.output, out);
    std::ostream& log = cfg.output.path.empty() ? err : out;
    fmt::print(log, "{}: {}\n", report.verdict, report.reason);
    return exit_for(verdict);
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 1;
  }
}

int cmd_check(const std::filesystem::path& config_path, std::string_view suite, const CommandOptions& options,
              std::ostream& out, std::ostream& err) {
  try {
    const bool all = suite == "all";
    if (!all && std::find(std::begin(kSuites), std::end(kSuites), suite) == std::end(kSuites)) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("--suite: unknown suite '{}'", suite));
    }
    ExperimentConfig cfg = load_config(config_path);
    apply_options(cfg, options);

    Report report;
    report.metadata = report_metadata(cfg, "check");
    report.metadata.emplace_back("suite", std::string(suite));
    bool passed = true;
    std::vector<std::string> lines;
    for (std::string_view name : kSuites) {
      if (!all && name != suite) continue;
      SuiteOutcome o;
      try {
        o = run_suite(name, cfg);
      } catch (const Error& e) {
        if (!all || (e.code() != ErrorCode::UnsupportedModel && e.code() != ErrorCode::DomainViolation)) throw;
        report.metadata.emplace_back(fmt::format("skipped.{}", name), e.what());
        lines.push_back(fmt::format("{}: skipped ({})", name, e.what()));
        continue;
      }
      passed = passed && o.passed;
      lines.push_back(fmt::format("{}: {} max_final_residual={:.6e} threshold={:.6e}", name,
                                  o.passed ? "PASS" : "FAIL", o.table.summary.max_final_residual, o.threshold));
      report.metadata.emplace_back(fmt::format("threshold.{}", name), format_number(o.threshold));
      report.diagnostics.push_back(std::move(o.table));
    }
    if (report.diagnostics.empty()) {
      throw Error(ErrorCode::UnsupportedModel, fmt::format("no suite applies to model '{}'", cfg.model.name()));
    }
    report.verdict = passed ? "pass" : "fail";
    report.reason = fmt::format("{}", fmt::join(lines, "; "));

    emit(report, cfg.output, out);
    std::ostream& log = cfg.output.path.empty() ? err : out;
    for (const auto& l : lines) fmt::print(log, "{}\n", l);
    return passed ? 0 : 2;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 1;
  }
}

}  // namespace gpinv
