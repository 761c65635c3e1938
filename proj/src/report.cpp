#include "gpinv/report.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>
#include <tuple>

#include "gpinv/error.hpp"

namespace gpinv {

namespace {

std::string num(double v) { return fmt::format("{:.16e}", v); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

std::vector<ResidualRow> sorted_rows(const ResidualTable& table) {
  std::vector<ResidualRow> rows = table.rows;
  auto key = [](const ResidualRow& r) {
    const bool has = r.lambda.has_value();
    return std::tuple(r.n, std::string_view(r.probe_id), has, has ? r.lambda->real() : 0.0,
                      has ? r.lambda->imag() : 0.0);
  };
  std::stable_sort(rows.begin(), rows.end(),
                   [&](const ResidualRow& a, const ResidualRow& b) { return key(a) < key(b); });
  return rows;
}

void render_csv(const Report& report, std::ostream& out) {
  for (const auto& [k, v] : report.metadata) out << "# " << k << " = " << one_line(v) << '\n';
  out << "# verdict = " << report.verdict << '\n';
  out << "# reason = " << one_line(report.reason) << '\n';

  if (report.run) {
    out << "# [stability]\n" << "n,pinv_norm,running_sup\n";
    for (const auto& r : report.run->trace.records) {
      out << r.n << ',' << num(r.pinv_norm) << ',' << num(r.running_sup) << '\n';
    }
    out << "# [iterates]\n" << "n,cauchy_gap,oracle_err\n";
    for (const auto& r : report.run->iterates) {
      out << r.n << ',' << num(r.cauchy_gap) << ',' << (r.oracle_err ? num(*r.oracle_err) : "") << '\n';
    }
    for (const auto& f : report.run->failures) {
      out << "# failed n = " << f.n << ": " << one_line(f.message) << '\n';
    }
  }
  if (!report.diagnostics.empty()) {
    out << "# [diagnostics]\n" << "suite,n,probe_id,lambda_re,lambda_im,residual\n";
    for (const auto& table : report.diagnostics) {
      for (const auto& r : sorted_rows(table)) {
        out << csv_field(table.suite) << ',' << r.n << ',' << csv_field(r.probe_id) << ','
            << (r.lambda ? num(r.lambda->real()) : "") << ',' << (r.lambda ? num(r.lambda->imag()) : "")
            << ',' << num(r.residual) << '\n';
      }
    }
    for (const auto& table : report.diagnostics) {
      for (const auto& s : table.skipped) {
        out << "# skipped " << table.suite << " n = " << s.n << " probe " << s.probe_id << ": "
            << one_line(s.reason) << '\n';
      }
    }
  }
}

void render_json(const Report& report, std::ostream& out) {
  using json = nlohmann::ordered_json;
  json doc;
  json meta = json::object();
  for (const auto& [k, v] : report.metadata) meta[k] = v;
  doc["metadata"] = std::move(meta);
  doc["verdict"] = report.verdict;
  doc["reason"] = report.reason;

  if (report.run) {
    json stability = json::array();
    for (const auto& r : report.run->trace.records) {
      stability.push_back({{"n", r.n}, {"pinv_norm", r.pinv_norm}, {"running_sup", r.running_sup}});
    }
    json iterates = json::array();
    for (const auto& r : report.run->iterates) {
      json row = {{"n", r.n}, {"cauchy_gap", r.cauchy_gap}, {"oracle_err", nullptr}};
      if (r.oracle_err) row["oracle_err"] = *r.oracle_err;
      iterates.push_back(std::move(row));
    }
    json failures = json::array();
    for (const auto& f : report.run->failures) {
      failures.push_back({{"n", f.n}, {"error", to_string(f.code)}, {"message", f.message}});
    }
    doc["stability"] = std::move(stability);
    doc["iterates"] = std::move(iterates);
    doc["failures"] = std::move(failures);
  }

  json diagnostics = json::array();
  for (const auto& table : report.diagnostics) {
    json rows = json::array();
    for (const auto& r : sorted_rows(table)) {
      json row = {{"n", r.n}, {"probe_id", r.probe_id}, {"lambda_re", nullptr}, {"lambda_im", nullptr},
                  {"residual", r.residual}};
      if (r.lambda) {
        row["lambda_re"] = r.lambda->real();
        row["lambda_im"] = r.lambda->imag();
      }
      rows.push_back(std::move(row));
    }
    json skipped = json::array();
    for (const auto& s : table.skipped) {
      skipped.push_back({{"n", s.n}, {"probe_id", s.probe_id}, {"reason", s.reason}});
    }
    diagnostics.push_back({{"suite", table.suite},
                           {"max_final_residual", table.summary.max_final_residual},
                           {"monotone_fraction", table.summary.monotone_fraction},
                           {"reference_error", table.reference_error},
                           {"rows", std::move(rows)},
                           {"skipped", std::move(skipped)}});
  }
  doc["diagnostics"] = std::move(diagnostics);
  out << doc.dump(2) << '\n';
}

void write_report(const Report& report, const OutputSpec& spec) {
  std::ofstream out(spec.path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot open report file '{}'", spec.path));
  if (spec.format == ReportFormat::Csv) render_csv(report, out);
  else render_json(report, out);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, fmt::format("failed writing report file '{}'", spec.path));
}

}  // namespace gpinv
