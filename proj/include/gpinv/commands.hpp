#pragma once

// Subcommands behind the `gpinv` executable. Each returns the process exit
// code and never throws.
//
//   run:   0 Convergent, 2 Divergent, 3 Inconclusive, 1 error
//   check: 0 every suite threshold met, 2 some threshold missed, 1 error

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "gpinv/config.hpp"
#include "gpinv/diagnostics.hpp"
#include "gpinv/report.hpp"

namespace gpinv {

struct CommandOptions {
  std::optional<std::string> out_path;  // overrides output.path
  std::optional<ReportFormat> format;   // overrides output.format
};

// Filter matches a substring of the name or the kind, case-insensitively.
int cmd_gallery_list(std::string_view filter, std::ostream& out);

int cmd_run(const std::filesystem::path& config_path, const CommandOptions& options, std::ostream& out,
            std::ostream& err);

// suite is one of kSuites or "all".
int cmd_check(const std::filesystem::path& config_path, std::string_view suite, const CommandOptions& options,
              std::ostream& out, std::ostream& err);

struct SuiteOutcome {
  ResidualTable table;
  bool passed = false;
  double threshold = 0.0;
};

// Runs one suite on the configured model and applies its pass rule.
SuiteOutcome run_suite(std::string_view suite, const ExperimentConfig& config);

// Config values, tool version and model name, as written to report metadata.
KeyValues report_metadata(const ExperimentConfig& config, std::string_view command);

}  // namespace gpinv
