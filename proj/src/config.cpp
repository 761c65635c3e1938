#include "gpinv/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gpinv/error.hpp"

namespace gpinv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void invalid(std::string_view key, std::string_view why) {
  throw Error(ErrorCode::ConfigInvalid, fmt::format("{}: {}", key, why));
}

double parse_double(std::string_view text, std::string_view key) {
  text = trim(text);
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    invalid(key, fmt::format("'{}' is not a finite number", text));
  }
  return v;
}

std::size_t parse_size(std::string_view text, std::string_view key) {
  text = trim(text);
  std::size_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) invalid(key, fmt::format("'{}' is not a non-negative integer", text));
  return v;
}

std::vector<double> parse_number_list(std::string_view text, std::string_view key) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  for (auto item : split(text, ',')) out.push_back(parse_double(item, key));
  return out;
}

std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_number(v[i]);
  }
  return s;
}

}  // namespace

std::string format_number(double v) { return fmt::format("{}", v); }

CoeffVector parse_vector_literal(std::string_view text) {
  const std::string_view key = "vector literal";
  text = trim(text);
  if (text.empty()) invalid(key, "empty vector");

  if (text.front() == 'e' && text.size() > 1 &&
      std::all_of(text.begin() + 1, text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    const std::size_t j = parse_size(text.substr(1), key);
    if (j == 0) invalid(key, "basis vectors are numbered from e1");
    return CoeffVector::basis(j);
  }

  std::optional<PowerTail> tail;
  const std::size_t tail_pos = text.find("tail(");
  std::string_view head = text;
  if (tail_pos != std::string_view::npos) {
    const std::size_t close = text.find(')', tail_pos);
    if (close == std::string_view::npos || !trim(text.substr(close + 1)).empty()) {
      invalid(key, fmt::format("malformed tail in '{}'", text));
    }
    const auto args = split(text.substr(tail_pos + 5, close - tail_pos - 5), ',');
    if (args.size() != 2) invalid(key, "tail(scale, power) takes two numbers");
    tail = PowerTail{parse_double(args[0], key), parse_double(args[1], key)};
    head = trim(text.substr(0, tail_pos));
    if (!head.empty()) {
      if (head.back() != '+') invalid(key, fmt::format("expected '+' before tail in '{}'", text));
      head = trim(head.substr(0, head.size() - 1));
      if (head.empty()) invalid(key, fmt::format("dangling '+' in '{}'", text));
    }
  }
  if (!head.empty() && head.front() == '[') {
    if (head.back() != ']') invalid(key, fmt::format("unbalanced brackets in '{}'", text));
    head = head.substr(1, head.size() - 2);
  }
  return CoeffVector(parse_number_list(head, key), tail);
}

std::string format_vector_literal(const CoeffVector& v) {
  std::string s = "[" + join_numbers(std::vector<double>(v.coeffs().begin(), v.coeffs().end())) + "]";
  if (v.tail()) s += fmt::format(" + tail({}, {})", format_number(v.tail()->scale), format_number(v.tail()->power));
  return s;
}

cplx parse_complex_literal(std::string_view text) {
  const std::string_view key = "complex literal";
  std::string compact;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
  }
  if (compact.empty()) invalid(key, "empty value");
  if (compact.back() != 'i') return {parse_double(compact, key), 0.0};

  const std::string_view body(compact.data(), compact.size() - 1);
  // Split at the last sign that is not the leading one or part of an exponent.
  std::size_t split_at = std::string_view::npos;
  for (std::size_t p = body.size(); p-- > 1;) {
    if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
      split_at = p;
      break;
    }
  }
  const std::string_view re = split_at == std::string_view::npos ? std::string_view{} : body.substr(0, split_at);
  std::string_view im = split_at == std::string_view::npos ? body : body.substr(split_at);
  double imag = 0.0;
  if (im.empty() || im == "+") {
    imag = 1.0;
  } else if (im == "-") {
    imag = -1.0;
  } else {
    if (im.front() == '+') im.remove_prefix(1);
    imag = parse_double(im, key);
  }
  return {re.empty() ? 0.0 : parse_double(re, key), imag};
}

std::string format_complex_literal(cplx z) {
  return fmt::format("{}{}{}i", format_number(z.real()), z.imag() < 0.0 ? "-" : "+",
                     format_number(std::abs(z.imag())));
}

std::optional<std::size_t> schedule_cap_from_env() {
  const char* raw = std::getenv("TOOL_SCHEDULE_MAX");
  if (!raw || !*raw) return std::nullopt;
  const std::size_t cap = parse_size(raw, "TOOL_SCHEDULE_MAX");
  if (cap == 0) invalid("TOOL_SCHEDULE_MAX", "must be positive");
  return cap;
}

namespace {

const std::set<std::string, std::less<>> kKnownKeys = {
    "model.name", "model.kind", "model.rule", "model.prefix", "model.tail_scale", "model.tail_power",
    "model.shift", "model.diag_prefix", "model.diag_tail", "model.off_prefix", "model.off_tail",
    "model.expected", "model.label", "data.y", "run.schedule", "run.divergence_threshold",
    "run.plateau_ratio", "run.residual_tol", "run.rank_rel_tol", "run.exact_rank", "run.rank_mode",
    "run.diagnostics", "probe.vectors", "probe.lambdas", "probe.perturbation_scale", "check.final_tol",
    "output.path", "output.format"};

class Entries {
 public:
  explicit Entries(std::map<std::string, std::string, std::less<>> kv) : kv_(std::move(kv)) {}

  std::optional<std::string_view> get(std::string_view key) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    used_.insert(it->first);
    return it->second;
  }
  bool has(std::string_view key) const { return kv_.find(key) != kv_.end(); }

  void reject_unused(std::string_view context) const {
    for (const auto& [k, v] : kv_) {
      if (!used_.count(k)) invalid(k, fmt::format("not applicable {}", context));
    }
  }

 private:
  std::map<std::string, std::string, std::less<>> kv_;
  std::set<std::string> used_;
};

Classification parse_expected(Entries& e, Classification fallback) {
  const auto v = e.get("model.expected");
  if (!v) return fallback;
  const auto c = parse_classification(*v);
  if (!c) invalid("model.expected", fmt::format("unknown classification '{}'", *v));
  return *c;
}

SpectralModel parse_model(Entries& e, bool& builtin) {
  if (const auto name = e.get("model.name")) {
    const SpectralModel* m = find_builtin(*name);
    if (!m) invalid("model.name", fmt::format("unknown built-in model '{}' (see `gallery`)", *name));
    for (const char* k : {"model.kind", "model.rule", "model.label"}) {
      if (e.has(k)) invalid(k, "cannot be combined with model.name");
    }
    builtin = true;
    const Classification expected = parse_expected(e, m->expected());
    if (m->diagonal()) return SpectralModel(m->name(), *m->diagonal(), expected);
    return SpectralModel(m->name(), *m->jacobi(), expected);
  }
  builtin = false;
  const auto kind = e.get("model.kind");
  if (!kind) invalid("model.kind", "missing (or give model.name)");
  const auto rule = e.get("model.rule");
  if (!rule) invalid("model.rule", "missing");
  const std::string label(e.get("model.label").value_or("custom"));

  if (*kind == "diagonal") {
    DiagonalRule r;
    if (*rule == "linear") r = DiagonalRule::linear();
    else if (*rule == "harmonic") r = DiagonalRule::harmonic();
    else if (*rule == "kernel_gap") r = DiagonalRule::kernel_gap();
    else if (*rule == "custom") {
      const auto scale = e.get("model.tail_scale");
      const auto power = e.get("model.tail_power");
      if (!scale) invalid("model.tail_scale", "required for a custom diagonal rule");
      r = DiagonalRule::custom(parse_number_list(e.get("model.prefix").value_or(""), "model.prefix"),
                               parse_double(*scale, "model.tail_scale"),
                               power ? parse_double(*power, "model.tail_power") : 0.0);
    } else {
      invalid("model.rule", fmt::format("unknown diagonal rule '{}'", *rule));
    }
    return SpectralModel(label, std::move(r), parse_expected(e, Classification::Unknown));
  }
  if (*kind == "jacobi") {
    JacobiRule r;
    if (*rule == "free") {
      r = JacobiRule::free();
    } else if (*rule == "shifted") {
      const auto shift = e.get("model.shift");
      if (!shift) invalid("model.shift", "required for a shifted Jacobi rule");
      r = JacobiRule::shifted(parse_double(*shift, "model.shift"));
    } else if (*rule == "custom") {
      r.tag = JacobiRule::Tag::Custom;
      r.diag_prefix = parse_number_list(e.get("model.diag_prefix").value_or(""), "model.diag_prefix");
      r.diag_tail = parse_double(e.get("model.diag_tail").value_or("0"), "model.diag_tail");
      r.off_prefix = parse_number_list(e.get("model.off_prefix").value_or(""), "model.off_prefix");
      r.off_tail = parse_double(e.get("model.off_tail").value_or("1"), "model.off_tail");
    } else {
      invalid("model.rule", fmt::format("unknown Jacobi rule '{}'", *rule));
    }
    return SpectralModel(label, std::move(r), parse_expected(e, Classification::Unknown));
  }
  invalid("model.kind", fmt::format("expected 'diagonal' or 'jacobi', got '{}'", *kind));
}

ProbeSet parse_probes(std::optional<std::string_view> vectors, std::optional<std::string_view> lambdas) {
  ProbeSet p = ProbeSet::defaults();
  if (vectors) {
    p.vectors.clear();
    std::size_t index = 0;
    for (auto item : split(*vectors, ';')) {
      if (item.empty()) continue;
      std::string id;
      std::string_view literal = item;
      const std::size_t colon = item.find(':');
      if (colon != std::string_view::npos) {
        id = std::string(trim(item.substr(0, colon)));
        literal = item.substr(colon + 1);
      } else if (item.front() == 'e' && item.find_first_of(",[(") == std::string_view::npos) {
        id = std::string(item);
      } else {
        id = fmt::format("p{}", index);
      }
      if (id.empty()) invalid("probe.vectors", "empty probe id");
      try {
        p.vectors.push_back({id, parse_vector_literal(literal)});
      } catch (const Error& err) {
        invalid("probe.vectors", err.what());
      }
      ++index;
    }
    if (p.vectors.empty()) invalid("probe.vectors", "no probe vectors given");
  }
  if (lambdas) {
    p.lambdas.clear();
    for (auto item : split(*lambdas, ',')) {
      try {
        p.lambdas.push_back(parse_complex_literal(item));
      } catch (const Error& err) {
        invalid("probe.lambdas", err.what());
      }
    }
  }
  try {
    p.validate();
  } catch (const Error& err) {
    invalid(lambdas ? "probe.lambdas" : "probe.vectors", err.what());
  }
  return p;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, std::optional<std::size_t> schedule_cap) {
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ConfigInvalid, fmt::format("line {}: expected 'key = value'", line_no));
    }
    const std::string key(trim(line.substr(0, eq)));
    if (!kKnownKeys.count(key)) invalid(key, fmt::format("unknown key (line {})", line_no));
    if (!kv.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
      invalid(key, fmt::format("duplicate key (line {})", line_no));
    }
  }
  Entries e(std::move(kv));

  ExperimentConfig cfg;
  if (e.has("model.name") || e.has("model.kind")) cfg.model = parse_model(e, cfg.builtin_model);
  else if (e.has("model.expected")) cfg.model = SpectralModel("linear", DiagonalRule::linear(), parse_expected(e, Classification::Stable));

  if (const auto y = e.get("data.y")) {
    try {
      cfg.y = parse_vector_literal(*y);
    } catch (const Error& err) {
      invalid("data.y", err.what());
    }
  }

  if (const auto v = e.get("run.schedule")) {
    cfg.run.schedule.clear();
    for (auto item : split(*v, ',')) cfg.run.schedule.push_back(parse_size(item, "run.schedule"));
  }
  if (const auto v = e.get("run.divergence_threshold")) cfg.run.divergence_threshold = parse_double(*v, "run.divergence_threshold");
  if (const auto v = e.get("run.plateau_ratio")) cfg.run.plateau_ratio = parse_double(*v, "run.plateau_ratio");
  if (const auto v = e.get("run.residual_tol")) cfg.run.residual_tol = parse_double(*v, "run.residual_tol");
  if (const auto v = e.get("run.rank_rel_tol"); v && *v != "auto") {
    cfg.run.tolerance.rank_rel_tol = parse_double(*v, "run.rank_rel_tol");
    if (!(cfg.run.tolerance.rank_rel_tol > 0.0)) invalid("run.rank_rel_tol", "must be positive");
  }
  if (const auto v = e.get("run.exact_rank"); v && *v != "none") cfg.run.tolerance.exact_rank = parse_size(*v, "run.exact_rank");
  if (const auto v = e.get("run.rank_mode")) {
    if (*v == "tolerance") cfg.run.rank_mode = RankMode::Tolerance;
    else if (*v == "analytic") cfg.run.rank_mode = RankMode::Analytic;
    else invalid("run.rank_mode", fmt::format("expected 'tolerance' or 'analytic', got '{}'", *v));
  }
  if (const auto v = e.get("run.diagnostics"); v && !v->empty() && *v != "none") {
    for (auto item : split(*v, ',')) {
      if (std::find(std::begin(kSuites), std::end(kSuites), item) == std::end(kSuites)) {
        invalid("run.diagnostics", fmt::format("unknown suite '{}'", item));
      }
      cfg.run_diagnostics.emplace_back(item);
    }
  }

  cfg.probes = parse_probes(e.get("probe.vectors"), e.get("probe.lambdas"));
  if (const auto v = e.get("probe.perturbation_scale")) {
    cfg.perturbation_scale = parse_double(*v, "probe.perturbation_scale");
    if (cfg.perturbation_scale < 0.0) invalid("probe.perturbation_scale", "must be non-negative");
  }
  if (const auto v = e.get("check.final_tol")) {
    cfg.check_tol = parse_double(*v, "check.final_tol");
    if (!(cfg.check_tol > 0.0)) invalid("check.final_tol", "must be positive");
  }
  if (const auto v = e.get("output.path")) cfg.output.path = std::string(*v);
  if (const auto v = e.get("output.format")) {
    if (*v == "csv") cfg.output.format = ReportFormat::Csv;
    else if (*v == "json") cfg.output.format = ReportFormat::Json;
    else invalid("output.format", fmt::format("expected 'csv' or 'json', got '{}'", *v));
  }
  e.reject_unused(fmt::format("to model '{}'", cfg.model.name()));

  cfg.run.validate();
  if (schedule_cap) {
    cfg.schedule_cap = schedule_cap;
    std::erase_if(cfg.run.schedule, [&](std::size_t n) { return n > *schedule_cap; });
    if (cfg.run.schedule.empty()) {
      invalid("run.schedule", fmt::format("no entries left under TOOL_SCHEDULE_MAX = {}", *schedule_cap));
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open config '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), schedule_cap_from_env());
}

KeyValues ExperimentConfig::effective() const {
  KeyValues kv;
  if (builtin_model) {
    kv.emplace_back("model.name", model.name());
  } else if (const auto* d = model.diagonal()) {
    kv.emplace_back("model.kind", "diagonal");
    switch (d->tag) {
      case DiagonalRule::Tag::Linear: kv.emplace_back("model.rule", "linear"); break;
      case DiagonalRule::Tag::Harmonic: kv.emplace_back("model.rule", "harmonic"); break;
      case DiagonalRule::Tag::KernelGap: kv.emplace_back("model.rule", "kernel_gap"); break;
      case DiagonalRule::Tag::CustomList:
        kv.emplace_back("model.rule", "custom");
        kv.emplace_back("model.prefix", join_numbers(d->prefix));
        kv.emplace_back("model.tail_scale", format_number(d->tail_scale));
        kv.emplace_back("model.tail_power", format_number(d->tail_power));
        break;
    }
    kv.emplace_back("model.label", model.name());
  } else {
    const auto& j = *model.jacobi();
    kv.emplace_back("model.kind", "jacobi");
    switch (j.tag) {
      case JacobiRule::Tag::Free: kv.emplace_back("model.rule", "free"); break;
      case JacobiRule::Tag::Shifted:
        kv.emplace_back("model.rule", "shifted");
        kv.emplace_back("model.shift", format_number(j.diag_tail));
        break;
      case JacobiRule::Tag::Custom:
        kv.emplace_back("model.rule", "custom");
        kv.emplace_back("model.diag_prefix", join_numbers(j.diag_prefix));
        kv.emplace_back("model.diag_tail", format_number(j.diag_tail));
        kv.emplace_back("model.off_prefix", join_numbers(j.off_prefix));
        kv.emplace_back("model.off_tail", format_number(j.off_tail));
        break;
    }
    kv.emplace_back("model.label", model.name());
  }
  kv.emplace_back("model.expected", std::string(to_string(model.expected())));
  kv.emplace_back("data.y", format_vector_literal(y));

  std::string schedule;
  for (std::size_t i = 0; i < run.schedule.size(); ++i) schedule += (i ? ", " : "") + std::to_string(run.schedule[i]);
  kv.emplace_back("run.schedule", schedule);
  kv.emplace_back("run.divergence_threshold", format_number(run.divergence_threshold));
  kv.emplace_back("run.plateau_ratio", format_number(run.plateau_ratio));
  kv.emplace_back("run.residual_tol", format_number(run.residual_tol));
  kv.emplace_back("run.rank_rel_tol",
                  run.tolerance.rank_rel_tol > 0.0 ? format_number(run.tolerance.rank_rel_tol) : "auto");
  kv.emplace_back("run.exact_rank",
                  run.tolerance.exact_rank ? std::to_string(*run.tolerance.exact_rank) : "none");
  kv.emplace_back("run.rank_mode", std::string(to_string(run.rank_mode)));
  std::string diags;
  for (std::size_t i = 0; i < run_diagnostics.size(); ++i) diags += (i ? ", " : "") + run_diagnostics[i];
  kv.emplace_back("run.diagnostics", diags.empty() ? "none" : diags);

  std::string vectors;
  for (std::size_t i = 0; i < probes.vectors.size(); ++i) {
    vectors += fmt::format("{}{}: {}", i ? "; " : "", probes.vectors[i].id, format_vector_literal(probes.vectors[i].vector));
  }
  kv.emplace_back("probe.vectors", vectors);
  std::string lambdas;
  for (std::size_t i = 0; i < probes.lambdas.size(); ++i) {
    lambdas += (i ? ", " : "") + format_complex_literal(probes.lambdas[i]);
  }
  kv.emplace_back("probe.lambdas", lambdas);
  kv.emplace_back("probe.perturbation_scale", format_number(perturbation_scale));
  kv.emplace_back("check.final_tol", format_number(check_tol));
  if (!output.path.empty()) kv.emplace_back("output.path", output.path);
  kv.emplace_back("output.format", output.format == ReportFormat::Csv ? "csv" : "json");
  return kv;
}

}  // namespace gpinv
