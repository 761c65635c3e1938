#include "gpinv/coeff_vector.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <mutex>

#include "gpinv/error.hpp"

namespace gpinv {

namespace {

void silence_gsl() {
  static std::once_flag flag;
  std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

}  // namespace

double power_sum_from(double exponent, std::size_t start) {
  if (!(exponent > 1.0) || start == 0) {
    throw Error(ErrorCode::DomainViolation,
                fmt::format("power series with exponent {} from k = {} does not converge", exponent, start));
  }
  silence_gsl();
  gsl_sf_result r;
  const int status = gsl_sf_hzeta_e(exponent, static_cast<double>(start), &r);
  if (status == GSL_EUNDRFLW) return 0.0;
  if (status != GSL_SUCCESS) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("hzeta({}, {}) failed: {}", exponent, start, gsl_strerror(status)));
  }
  return r.val;
}

CoeffVector::CoeffVector(std::vector<double> coeffs, std::optional<PowerTail> tail)
    : coeffs_(std::move(coeffs)), tail_(tail) {
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "non-finite coefficient");
  }
  if (tail_) {
    if (!std::isfinite(tail_->scale) || !std::isfinite(tail_->power)) {
      throw Error(ErrorCode::InvalidArgument, "non-finite tail parameters");
    }
    if (tail_->scale != 0.0 && !(tail_->power > 0.5)) {
      throw Error(ErrorCode::DomainViolation,
                  fmt::format("tail k^-{} is not square summable (need power > 1/2)", tail_->power));
    }
  }
}

CoeffVector CoeffVector::basis(std::size_t j) {
  if (j == 0) throw Error(ErrorCode::InvalidArgument, "basis index is 1-based");
  std::vector<double> c(j, 0.0);
  c[j - 1] = 1.0;
  return CoeffVector(std::move(c));
}

CoeffVector CoeffVector::power_law(double scale, double power) {
  return CoeffVector({}, PowerTail{scale, power});
}

std::size_t CoeffVector::support() const noexcept {
  for (std::size_t k = coeffs_.size(); k > 0; --k) {
    if (coeffs_[k - 1] != 0.0) return k;
  }
  return 0;
}

double CoeffVector::at(std::size_t k) const {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "coordinate index is 1-based");
  if (k <= coeffs_.size()) return coeffs_[k - 1];
  if (tail_) return tail_->scale * std::pow(static_cast<double>(k), -tail_->power);
  return 0.0;
}

std::vector<double> CoeffVector::head(std::size_t n) const {
  std::vector<double> out(n, 0.0);
  const std::size_t m = std::min(n, coeffs_.size());
  std::copy_n(coeffs_.begin(), m, out.begin());
  if (tail_ && tail_->scale != 0.0) {
    for (std::size_t k = m + 1; k <= n; ++k) out[k - 1] = at(k);
  }
  return out;
}

double CoeffVector::tail_norm_sq(std::size_t n) const {
  double sum = 0.0;
  for (std::size_t k = n + 1; k <= coeffs_.size(); ++k) sum += coeffs_[k - 1] * coeffs_[k - 1];
  if (tail_ && tail_->scale != 0.0) {
    const std::size_t start = std::max(n, coeffs_.size()) + 1;
    sum += tail_->scale * tail_->scale * power_sum_from(2.0 * tail_->power, start);
  }
  return sum;
}

double CoeffVector::norm() const {
  return std::sqrt(tail_norm_sq(0));
}

std::string CoeffVector::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (i) s += ", ";
    s += fmt::format("{}", coeffs_[i]);
  }
  s += "]";
  if (tail_) s += fmt::format(" + {}*k^-{} (k > {})", tail_->scale, tail_->power, coeffs_.size());
  return s;
}

double padded_distance(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::max(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (i < a.size() ? a[i] : 0.0) - (i < b.size() ? b[i] : 0.0);
    sum += d * d;
  }
  return std::sqrt(sum);
}

double norm2(std::span<const double> a) {
  double sum = 0.0;
  for (double v : a) sum += v * v;
  return std::sqrt(sum);
}

}  // namespace gpinv
