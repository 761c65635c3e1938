#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gpinv {

// Symbolic infinite tail x_k = scale * k^(-power), for every k past the
// explicit coefficients.
struct PowerTail {
  double scale = 0.0;
  double power = 0.0;

  friend bool operator==(const PowerTail&, const PowerTail&) = default;
};

// Element of l^2 in the canonical basis e_1, e_2, ... (indices are 1-based in
// the public interface). Explicit coefficients cover e_1..e_m; beyond that the
// vector is zero unless a PowerTail is attached.
class CoeffVector {
 public:
  CoeffVector() = default;
  // Throws DomainViolation if the tail is not square summable (power <= 1/2).
  explicit CoeffVector(std::vector<double> coeffs, std::optional<PowerTail> tail = std::nullopt);

  static CoeffVector basis(std::size_t j);
  static CoeffVector power_law(double scale, double power);

  std::span<const double> coeffs() const noexcept { return coeffs_; }
  const std::optional<PowerTail>& tail() const noexcept { return tail_; }

  bool finitely_supported() const noexcept { return !tail_ || tail_->scale == 0.0; }
  // Largest index with a nonzero coordinate; 0 for the zero vector. Only
  // meaningful when finitely supported.
  std::size_t support() const noexcept;

  double at(std::size_t k) const;  // x_k, k >= 1
  // P_n x as a dense vector of length n.
  std::vector<double> head(std::size_t n) const;

  // Exact sum over k > n of x_k^2.
  double tail_norm_sq(std::size_t n) const;
  double norm() const;

  std::string to_string() const;

  friend bool operator==(const CoeffVector&, const CoeffVector&) = default;

 private:
  std::vector<double> coeffs_;
  std::optional<PowerTail> tail_;
};

// sum_{k >= start} k^(-exponent), exponent > 1 (Hurwitz zeta).
double power_sum_from(double exponent, std::size_t start);

// ||a - b|| after zero-padding the shorter operand.
double padded_distance(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace gpinv
