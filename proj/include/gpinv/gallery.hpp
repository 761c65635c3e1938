#pragma once

// Self-adjoint model operators on l^2 and their finite sections
// A_n = P_n A restricted to span{e_1..e_n}.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gpinv/coeff_vector.hpp"
#include "gpinv/linalg.hpp"

namespace gpinv {

enum class ModelKind { Diagonal, Jacobi };
enum class Classification { Stable, Unstable, StableWithKernel, Unknown };

std::string_view to_string(ModelKind kind) noexcept;
std::string_view to_string(Classification c) noexcept;
std::optional<Classification> parse_classification(std::string_view text) noexcept;

// lambda_k = prefix[k-1] for k <= prefix.size(), tail_scale * k^tail_power
// afterwards.
struct DiagonalRule {
  enum class Tag { Linear, Harmonic, KernelGap, CustomList };

  Tag tag = Tag::CustomList;
  std::vector<double> prefix;
  double tail_scale = 0.0;
  double tail_power = 0.0;

  static DiagonalRule linear() { return {Tag::Linear, {}, 1.0, 1.0}; }
  static DiagonalRule harmonic() { return {Tag::Harmonic, {}, 1.0, -1.0}; }
  static DiagonalRule kernel_gap() { return {Tag::KernelGap, {0.0}, 1.0, 1.0}; }
  static DiagonalRule custom(std::vector<double> prefix, double tail_scale, double tail_power) {
    return {Tag::CustomList, std::move(prefix), tail_scale, tail_power};
  }

  double eigenvalue(std::size_t k) const;
};

// Symmetric tridiagonal operator: a_k on the diagonal, b_k coupling e_k and
// e_{k+1}. Each sequence is an explicit prefix followed by a constant.
struct JacobiRule {
  enum class Tag { Free, Shifted, Custom };

  Tag tag = Tag::Custom;
  std::vector<double> diag_prefix;
  double diag_tail = 0.0;
  std::vector<double> off_prefix;
  double off_tail = 1.0;

  static JacobiRule free() { return {Tag::Free, {}, 0.0, {}, 1.0}; }
  static JacobiRule shifted(double c) { return {Tag::Shifted, {}, c, {}, 1.0}; }

  double diag(std::size_t k) const;
  double off(std::size_t k) const;
  bool constant() const noexcept { return diag_prefix.empty() && off_prefix.empty(); }
};

class SpectralModel {
 public:
  SpectralModel(std::string name, DiagonalRule rule, Classification expected);
  SpectralModel(std::string name, JacobiRule rule, Classification expected);

  const std::string& name() const noexcept { return name_; }
  ModelKind kind() const noexcept;
  Classification expected() const noexcept { return expected_; }
  const DiagonalRule* diagonal() const noexcept { return std::get_if<DiagonalRule>(&rule_); }
  const JacobiRule* jacobi() const noexcept { return std::get_if<JacobiRule>(&rule_); }

  std::size_t bandwidth() const noexcept { return kind() == ModelKind::Jacobi ? 1 : 0; }
  bool bounded() const noexcept;
  // dim N(A_n) when it follows from the rule analytically.
  std::optional<std::size_t> truncation_kernel_dim(std::size_t n) const;
  // Closed-form spectrum of A_n (diagonal rules, constant Jacobi rules).
  std::optional<std::vector<double>> analytic_eigenvalues(std::size_t n) const;

  std::string rule_description() const;

 private:
  std::string name_;
  std::variant<DiagonalRule, JacobiRule> rule_;
  Classification expected_;
};

struct OracleAnswer {
  std::optional<CoeffVector> value;
  bool exact = false;
  std::string description;
};

SymMatrix truncate(const SpectralModel& model, std::size_t n);
CoeffVector apply(const SpectralModel& model, const CoeffVector& x);
OracleAnswer oracle_pinv_apply(const SpectralModel& model, const CoeffVector& y);
bool in_domain(const SpectralModel& model, const CoeffVector& x);

// P_{N(A)} x and P_{R(A)} x for diagonal models, componentwise: the kernel
// is spanned by the coordinates with lambda_k = 0.
CoeffVector oracle_kernel_projection(const SpectralModel& model, const CoeffVector& x);
CoeffVector oracle_range_projection(const SpectralModel& model, const CoeffVector& x);

// The built-in labeled gallery, in listing order.
const std::vector<SpectralModel>& builtin_gallery();
const SpectralModel* find_builtin(std::string_view name);

}  // namespace gpinv
