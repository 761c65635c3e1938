#include "gpinv/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "gpinv/error.hpp"

namespace gpinv {

std::string_view to_string(ModelKind kind) noexcept {
  return kind == ModelKind::Diagonal ? "Diagonal" : "Jacobi";
}

std::string_view to_string(Classification c) noexcept {
  switch (c) {
    case Classification::Stable: return "Stable";
    case Classification::Unstable: return "Unstable";
    case Classification::StableWithKernel: return "StableWithKernel";
    case Classification::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::optional<Classification> parse_classification(std::string_view text) noexcept {
  for (auto c : {Classification::Stable, Classification::Unstable, Classification::StableWithKernel,
                 Classification::Unknown}) {
    if (text == to_string(c)) return c;
  }
  return std::nullopt;
}

double DiagonalRule::eigenvalue(std::size_t k) const {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "eigenvalue index is 1-based");
  if (k <= prefix.size()) return prefix[k - 1];
  if (tail_scale == 0.0) return 0.0;
  if (tail_power == 1.0) return tail_scale * static_cast<double>(k);
  if (tail_power == -1.0) return tail_scale / static_cast<double>(k);
  if (tail_power == 0.0) return tail_scale;
  return tail_scale * std::pow(static_cast<double>(k), tail_power);
}

double JacobiRule::diag(std::size_t k) const {
  return k >= 1 && k <= diag_prefix.size() ? diag_prefix[k - 1] : diag_tail;
}

double JacobiRule::off(std::size_t k) const {
  return k >= 1 && k <= off_prefix.size() ? off_prefix[k - 1] : off_tail;
}

namespace {

void validate(const DiagonalRule& r) {
  bool ok = std::isfinite(r.tail_scale) && std::isfinite(r.tail_power);
  for (double v : r.prefix) ok = ok && std::isfinite(v);
  if (!ok) throw Error(ErrorCode::InvalidArgument, "diagonal rule has non-finite parameters");
}

void validate(const JacobiRule& r) {
  bool ok = std::isfinite(r.diag_tail) && std::isfinite(r.off_tail);
  for (double v : r.diag_prefix) ok = ok && std::isfinite(v);
  for (double v : r.off_prefix) ok = ok && std::isfinite(v);
  if (!ok) throw Error(ErrorCode::InvalidArgument, "Jacobi rule has non-finite parameters");
}

}  // namespace

SpectralModel::SpectralModel(std::string name, DiagonalRule rule, Classification expected)
    : name_(std::move(name)), rule_(std::move(rule)), expected_(expected) {
  validate(std::get<DiagonalRule>(rule_));
}

SpectralModel::SpectralModel(std::string name, JacobiRule rule, Classification expected)
    : name_(std::move(name)), rule_(std::move(rule)), expected_(expected) {
  validate(std::get<JacobiRule>(rule_));
}

ModelKind SpectralModel::kind() const noexcept {
  return std::holds_alternative<DiagonalRule>(rule_) ? ModelKind::Diagonal : ModelKind::Jacobi;
}

bool SpectralModel::bounded() const noexcept {
  if (const auto* d = diagonal()) return d->tail_scale == 0.0 || d->tail_power <= 0.0;
  return true;  // finitely many distinct coefficients
}

std::optional<std::size_t> SpectralModel::truncation_kernel_dim(std::size_t n) const {
  if (const auto* d = diagonal()) {
    std::size_t zeros = 0;
    for (std::size_t k = 1; k <= n; ++k) zeros += d->eigenvalue(k) == 0.0 ? 1 : 0;
    return zeros;
  }
  const auto& j = *jacobi();
  if (!j.constant()) return std::nullopt;
  if (j.off_tail == 0.0) return j.diag_tail == 0.0 ? n : 0;
  // Spectrum is a + 2b cos(k pi / (n + 1)); zero is hit exactly only in the
  // symmetric case a = 0 (middle index of odd n).
  if (std::abs(j.diag_tail) > 2.0 * std::abs(j.off_tail)) return 0;
  if (j.diag_tail == 0.0) return n % 2 == 1 ? 1 : 0;
  return std::nullopt;
}

std::optional<std::vector<double>> SpectralModel::analytic_eigenvalues(std::size_t n) const {
  std::vector<double> values(n);
  if (const auto* d = diagonal()) {
    for (std::size_t k = 1; k <= n; ++k) values[k - 1] = d->eigenvalue(k);
  } else {
    const auto& j = *jacobi();
    if (!j.constant()) return std::nullopt;
    for (std::size_t k = 1; k <= n; ++k) {
      values[k - 1] = j.diag_tail + 2.0 * j.off_tail *
                                        std::cos(static_cast<double>(k) * std::numbers::pi /
                                                 static_cast<double>(n + 1));
    }
  }
  std::sort(values.begin(), values.end());
  return values;
}

std::string SpectralModel::rule_description() const {
  if (const auto* d = diagonal()) {
    switch (d->tag) {
      case DiagonalRule::Tag::Linear: return "Diagonal Linear lambda_k=k";
      case DiagonalRule::Tag::Harmonic: return "Diagonal Harmonic lambda_k=1/k";
      case DiagonalRule::Tag::KernelGap: return "Diagonal KernelGap lambda_1=0 lambda_k=k(k>=2)";
      case DiagonalRule::Tag::CustomList:
        return fmt::format("Diagonal CustomList prefix=[{}] tail={}*k^{}", fmt::join(d->prefix, ","),
                           d->tail_scale, d->tail_power);
    }
  }
  const auto& j = *jacobi();
  switch (j.tag) {
    case JacobiRule::Tag::Free: return "Jacobi Free a_k=0 b_k=1";
    case JacobiRule::Tag::Shifted: return fmt::format("Jacobi Shifted({}) a_k={} b_k=1", j.diag_tail, j.diag_tail);
    case JacobiRule::Tag::Custom:
      return fmt::format("Jacobi Custom a=[{}] then {} b=[{}] then {}", fmt::join(j.diag_prefix, ","),
                         j.diag_tail, fmt::join(j.off_prefix, ","), j.off_tail);
  }
  return {};
}

SymMatrix truncate(const SpectralModel& model, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "truncation size must be at least 1");
  if (const auto* d = model.diagonal()) {
    std::vector<double> diag(n);
    for (std::size_t k = 1; k <= n; ++k) diag[k - 1] = d->eigenvalue(k);
    return SymMatrix::diagonal(diag);
  }
  const auto& j = *model.jacobi();
  std::vector<double> diag(n), off(n - 1);
  for (std::size_t k = 1; k <= n; ++k) diag[k - 1] = j.diag(k);
  for (std::size_t k = 1; k < n; ++k) off[k - 1] = j.off(k);
  return SymMatrix::tridiagonal(diag, off);
}

CoeffVector apply(const SpectralModel& model, const CoeffVector& x) {
  if (const auto* d = model.diagonal()) {
    const std::size_t len = std::max(x.coeffs().size(), d->prefix.size());
    const bool has_tail = !x.finitely_supported() && d->tail_scale != 0.0;
    const std::size_t out_len = x.finitely_supported() ? x.coeffs().size() : len;
    std::vector<double> out(out_len);
    for (std::size_t k = 1; k <= out_len; ++k) out[k - 1] = d->eigenvalue(k) * x.at(k);
    if (!has_tail) return CoeffVector(std::move(out));
    const PowerTail t{x.tail()->scale * d->tail_scale, x.tail()->power - d->tail_power};
    if (!(t.power > 0.5)) {
      throw Error(ErrorCode::DomainViolation,
                  fmt::format("A x has tail ~ k^-{}, not in l^2: x is outside D(A)", t.power));
    }
    return CoeffVector(std::move(out), t);
  }
  if (!x.finitely_supported()) {
    throw Error(ErrorCode::UnsupportedModel, "Jacobi models act on finitely supported vectors only");
  }
  const auto& j = *model.jacobi();
  const std::size_t m = x.coeffs().size();
  std::vector<double> out(m + 1, 0.0);
  for (std::size_t k = 1; k <= m + 1; ++k) {
    double v = 0.0;
    if (k >= 2) v += j.off(k - 1) * x.at(k - 1);
    if (k <= m) v += j.diag(k) * x.at(k);
    if (k + 1 <= m) v += j.off(k) * x.at(k + 1);
    out[k - 1] = v;
  }
  return CoeffVector(std::move(out));
}

OracleAnswer oracle_pinv_apply(const SpectralModel& model, const CoeffVector& y) {
  const auto* d = model.diagonal();
  if (!d) {
    throw Error(ErrorCode::UnsupportedModel,
                fmt::format("no componentwise pseudoinverse oracle for {}", model.rule_description()));
  }
  const bool has_tail = !y.finitely_supported() && d->tail_scale != 0.0;
  const std::size_t len =
      y.finitely_supported() ? y.coeffs().size() : std::max(y.coeffs().size(), d->prefix.size());
  std::vector<double> out(len);
  for (std::size_t k = 1; k <= len; ++k) {
    const double lam = d->eigenvalue(k);
    out[k - 1] = lam != 0.0 ? y.at(k) / lam : 0.0;
  }
  if (!has_tail) {
    return OracleAnswer{CoeffVector(std::move(out)), true, "componentwise y_k / lambda_k"};
  }
  const PowerTail t{y.tail()->scale / d->tail_scale, y.tail()->power + d->tail_power};
  if (!(t.power > 0.5)) {
    return OracleAnswer{std::nullopt, false,
                        fmt::format("DomainViolation: sum (y_k/lambda_k)^2 ~ sum k^-{} diverges, y not in D(A^+)",
                                    2.0 * t.power)};
  }
  return OracleAnswer{CoeffVector(std::move(out), t), true, "componentwise y_k / lambda_k with power tail"};
}

bool in_domain(const SpectralModel& model, const CoeffVector& x) {
  if (x.finitely_supported()) return true;
  const auto* d = model.diagonal();
  if (!d) {
    throw Error(ErrorCode::UnsupportedModel, "domain test for Jacobi models needs a finitely supported vector");
  }
  if (d->tail_scale == 0.0) return true;
  return x.tail()->power - d->tail_power > 0.5;
}

namespace {

CoeffVector componentwise_projection(const SpectralModel& model, const CoeffVector& x, bool kernel) {
  const auto* d = model.diagonal();
  if (!d) throw Error(ErrorCode::UnsupportedModel, "no analytic kernel for Jacobi models");
  const bool tail_in_kernel = d->tail_scale == 0.0;
  const bool keep_tail = !x.finitely_supported() && tail_in_kernel == kernel;
  const std::size_t len =
      x.finitely_supported() ? x.coeffs().size() : std::max(x.coeffs().size(), d->prefix.size());
  std::vector<double> out(len);
  for (std::size_t k = 1; k <= len; ++k) {
    out[k - 1] = (d->eigenvalue(k) == 0.0) == kernel ? x.at(k) : 0.0;
  }
  if (keep_tail) return CoeffVector(std::move(out), x.tail());
  return CoeffVector(std::move(out));
}

}  // namespace

CoeffVector oracle_kernel_projection(const SpectralModel& model, const CoeffVector& x) {
  return componentwise_projection(model, x, true);
}

CoeffVector oracle_range_projection(const SpectralModel& model, const CoeffVector& x) {
  return componentwise_projection(model, x, false);
}

const std::vector<SpectralModel>& builtin_gallery() {
  static const std::vector<SpectralModel> models = [] {
    std::vector<SpectralModel> m;
    m.emplace_back("linear", DiagonalRule::linear(), Classification::Stable);
    m.emplace_back("harmonic", DiagonalRule::harmonic(), Classification::Unstable);
    m.emplace_back("kernel_gap", DiagonalRule::kernel_gap(), Classification::StableWithKernel);
    m.emplace_back("unit", DiagonalRule::custom({}, 1.0, 0.0), Classification::Stable);
    m.emplace_back("zero", DiagonalRule::custom({}, 0.0, 0.0), Classification::StableWithKernel);
    m.emplace_back("jacobi_free", JacobiRule::free(), Classification::Unstable);
    m.emplace_back("jacobi_shifted3", JacobiRule::shifted(3.0), Classification::Stable);
    return m;
  }();
  return models;
}

const SpectralModel* find_builtin(std::string_view name) {
  for (const auto& m : builtin_gallery()) {
    if (m.name() == name) return &m;
  }
  return nullptr;
}

}  // namespace gpinv
