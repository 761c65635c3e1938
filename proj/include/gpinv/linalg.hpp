#pragma once

// Dense real-symmetric linear algebra: eigendecomposition, tolerance-based
// Moore-Penrose pseudoinverse, resolvents at non-real shifts and orthogonal
// projections onto range and kernel. Every function is pure; all types are
// immutable values once built.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace gpinv {

using cplx = std::complex<double>;

class SymMatrix {
 public:
  explicit SymMatrix(std::size_t dim);

  // Row-major dim x dim entries; stored as (a + a^T) / 2 so the result is
  // exactly symmetric (an already symmetric input is kept bit for bit).
  static SymMatrix from_rows(std::size_t dim, std::span<const double> entries);
  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(std::span<const double> diag);
  static SymMatrix tridiagonal(std::span<const double> diag, std::span<const double> offdiag);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * dim_ + j]; }
  std::span<const double> data() const noexcept { return data_; }

  // Largest |i - j| with a nonzero entry (0 for diagonal matrices).
  std::size_t bandwidth() const noexcept;

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  SymMatrix(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data)) {}

  std::size_t dim_;
  std::vector<double> data_;
};

class ComplexMatrix {
 public:
  ComplexMatrix(std::size_t dim, std::vector<cplx> data);

  std::size_t dim() const noexcept { return dim_; }
  cplx operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * dim_ + j]; }
  std::span<const cplx> data() const noexcept { return data_; }

 private:
  std::size_t dim_;
  std::vector<cplx> data_;
};

struct EigenDecomposition {
  std::size_t dim = 0;
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // row-major; column k is the eigenvector of values[k]

  double vector(std::size_t row, std::size_t k) const noexcept { return vectors[row * dim + k]; }
};

struct ToleranceContext {
  // Relative rank cut. Zero selects the default 1e-12 * dim.
  double rank_rel_tol = 0.0;
  // When set, keep exactly this many eigenvalues (largest |mu| first).
  std::optional<std::size_t> exact_rank;

  double effective_rel_tol(std::size_t dim) const noexcept {
    return rank_rel_tol > 0.0 ? rank_rel_tol : 1e-12 * static_cast<double>(dim);
  }
};

// Which eigenpairs survive the rank cut.
struct RankCut {
  std::vector<bool> retained;
  std::size_t rank = 0;
  double sigma_min_pos = 0.0;  // smallest retained |mu|, 0 when rank 0
};

struct PinvResult {
  SymMatrix matrix;
  std::size_t rank = 0;
  double sigma_min_pos = 0.0;
  double norm = 0.0;  // 1 / sigma_min_pos, 0 when rank 0
};

EigenDecomposition eig_sym(const SymMatrix& a);

RankCut select_rank(const EigenDecomposition& eig, const ToleranceContext& tol);

PinvResult pinv(const SymMatrix& a, const ToleranceContext& tol = {});
PinvResult pinv(const EigenDecomposition& eig, const ToleranceContext& tol = {});

// (lambda I - a)^{-1}; lambda must have a nonzero imaginary part.
ComplexMatrix resolvent(const SymMatrix& a, cplx lambda);
ComplexMatrix resolvent(const EigenDecomposition& eig, cplx lambda);
// (lambda I - a)^{-1} x from a factorization, without forming the matrix.
std::vector<cplx> resolvent_apply(const EigenDecomposition& eig, cplx lambda,
                                  std::span<const double> x);

SymMatrix proj_range(const SymMatrix& a, const ToleranceContext& tol = {});
SymMatrix proj_kernel(const SymMatrix& a, const ToleranceContext& tol = {});
SymMatrix proj_range(const EigenDecomposition& eig, const ToleranceContext& tol = {});
SymMatrix proj_kernel(const EigenDecomposition& eig, const ToleranceContext& tol = {});

// Spectral norm of a symmetric matrix, max |mu|.
double op_norm(const SymMatrix& a);

// Dense helpers shared by diagnostics and tests.
std::vector<double> multiply(const SymMatrix& a, const SymMatrix& b);  // row-major, not symmetric
std::vector<double> multiply(const SymMatrix& a, std::span<const double> x);
std::vector<cplx> multiply(const ComplexMatrix& a, std::span<const double> x);
double frobenius(std::span<const double> entries);
double max_abs(std::span<const double> entries);

}  // namespace gpinv
