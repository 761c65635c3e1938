#pragma once

// Machine-readable run and check reports.
//
// CSV: `# key = value` metadata lines, then one `# [section]` marker per
// table followed by a header row. Sections are `stability`, `iterates` and
// `diagnostics`. JSON carries the same content as a single object.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gpinv/config.hpp"
#include "gpinv/diagnostics.hpp"
#include "gpinv/engine.hpp"

namespace gpinv {

struct Report {
  KeyValues metadata;
  std::optional<BestApproxRun> run;
  std::vector<ResidualTable> diagnostics;
  std::string verdict;
  std::string reason;
};

// Diagnostics rows ordered by (n, probe_id, lambda) within each suite.
std::vector<ResidualRow> sorted_rows(const ResidualTable& table);

void render_csv(const Report& report, std::ostream& out);
void render_json(const Report& report, std::ostream& out);
// Throws Io when the file cannot be written.
void write_report(const Report& report, const OutputSpec& spec);

}  // namespace gpinv
