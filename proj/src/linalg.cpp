#include "gpinv/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gpinv/error.hpp"
#include "gpinv/kernels.hpp"

namespace gpinv {

namespace {

void require_dim(std::size_t dim) {
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "matrix dimension must be at least 1");
}

// Components below this magnitude do not decide an eigenvector's sign.
constexpr double kSignFloor = 1e-10;
constexpr double kRankGapRel = 1e-14;

}  // namespace

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) { require_dim(dim); }

SymMatrix SymMatrix::from_rows(std::size_t dim, std::span<const double> entries) {
  require_dim(dim);
  if (entries.size() != dim * dim) {
    throw Error(ErrorCode::InvalidArgument,
                "expected " + std::to_string(dim * dim) + " entries, got " +
                    std::to_string(entries.size()));
  }
  std::vector<double> data(dim * dim);
  for (std::size_t i = 0; i < dim; ++i) {
    data[i * dim + i] = entries[i * dim + i];
    for (std::size_t j = i + 1; j < dim; ++j) {
      const double s = (entries[i * dim + j] + entries[j * dim + i]) / 2.0;
      data[i * dim + j] = s;
      data[j * dim + i] = s;
    }
  }
  return SymMatrix(dim, std::move(data));
}

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.data_[i * dim + i] = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.data_[i * diag.size() + i] = diag[i];
  return m;
}

SymMatrix SymMatrix::tridiagonal(std::span<const double> diag, std::span<const double> offdiag) {
  const std::size_t n = diag.size();
  if (n == 0 || offdiag.size() + 1 != n) {
    throw Error(ErrorCode::InvalidArgument, "tridiagonal needs n >= 1 diagonal and n-1 off-diagonal entries");
  }
  SymMatrix m = diagonal(diag);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    m.data_[i * n + i + 1] = offdiag[i];
    m.data_[(i + 1) * n + i] = offdiag[i];
  }
  return m;
}

std::size_t SymMatrix::bandwidth() const noexcept {
  std::size_t band = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i + band + 1; j < dim_; ++j) {
      if (data_[i * dim_ + j] != 0.0) band = j - i;
    }
  }
  return band;
}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<cplx> data)
    : dim_(dim), data_(std::move(data)) {
  require_dim(dim);
  if (data_.size() != dim * dim) throw Error(ErrorCode::InvalidArgument, "complex matrix size mismatch");
}

EigenDecomposition eig_sym(const SymMatrix& a) {
  const std::size_t n = a.dim();
  for (double v : a.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "matrix has non-finite entries");
  }

  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  if (a.bandwidth() <= 1) {
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) diag(i) = a(i, i);
    for (std::size_t i = 0; i + 1 < n; ++i) sub(i) = a(i + 1, i);
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  } else {
    const Eigen::Map<const RowMat> view(a.data().data(), n, n);
    solver.compute(Eigen::MatrixXd(view), Eigen::ComputeEigenvectors);
  }
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::IterationFailure,
                "symmetric eigensolver did not converge (dim " + std::to_string(n) + ")");
  }

  EigenDecomposition out;
  out.dim = n;
  out.values.resize(n);
  out.vectors.resize(n * n);
  const auto& vals = solver.eigenvalues();
  const auto& vecs = solver.eigenvectors();
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = vals(static_cast<Eigen::Index>(k));
    double sign = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = vecs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      if (std::abs(v) > kSignFloor) {
        sign = v < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      out.vectors[i * n + k] = sign * vecs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    }
  }
  return out;
}

RankCut select_rank(const EigenDecomposition& eig, const ToleranceContext& tol) {
  const std::size_t n = eig.dim;
  RankCut cut;
  cut.retained.assign(n, false);

  if (tol.exact_rank) {
    const std::size_t r = *tol.exact_rank;
    if (r > n) {
      throw Error(ErrorCode::InvalidArgument,
                  "exact_rank " + std::to_string(r) + " exceeds dimension " + std::to_string(n));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return std::abs(eig.values[x]) > std::abs(eig.values[y]);
    });
    if (r > 0) {
      const double last_kept = std::abs(eig.values[order[r - 1]]);
      const double first_dropped = r < n ? std::abs(eig.values[order[r]]) : 0.0;
      if (last_kept == 0.0 || (r < n && last_kept - first_dropped <= kRankGapRel * last_kept)) {
        throw Error(ErrorCode::RankAmbiguity,
                    "|eigenvalues| at the rank-" + std::to_string(r) + " cut are not separated (" +
                        std::to_string(last_kept) + " vs " + std::to_string(first_dropped) + ")");
      }
    }
    for (std::size_t k = 0; k < r; ++k) cut.retained[order[k]] = true;
    cut.rank = r;
  } else {
    double spectral_radius = 0.0;
    for (double v : eig.values) spectral_radius = std::max(spectral_radius, std::abs(v));
    const double threshold = tol.effective_rel_tol(n) * std::max(1.0, spectral_radius);
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(eig.values[k]) > threshold) {
        cut.retained[k] = true;
        ++cut.rank;
      }
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (!cut.retained[k]) continue;
    const double s = std::abs(eig.values[k]);
    if (cut.sigma_min_pos == 0.0 || s < cut.sigma_min_pos) cut.sigma_min_pos = s;
  }
  return cut;
}

PinvResult pinv(const EigenDecomposition& eig, const ToleranceContext& tol) {
  const std::size_t n = eig.dim;
  const RankCut cut = select_rank(eig, tol);
  std::vector<double> weights(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (cut.retained[k]) weights[k] = 1.0 / eig.values[k];
  }
  std::vector<double> entries(n * n);
  kernels::omp::spectral_reconstruct(eig.vectors, weights, n, entries);
  return PinvResult{SymMatrix::from_rows(n, entries), cut.rank, cut.sigma_min_pos,
                    cut.rank > 0 ? 1.0 / cut.sigma_min_pos : 0.0};
}

PinvResult pinv(const SymMatrix& a, const ToleranceContext& tol) { return pinv(eig_sym(a), tol); }

namespace {

void require_non_real(cplx lambda) {
  if (lambda.imag() == 0.0) {
    throw Error(ErrorCode::NonRealRequired,
                "resolvent shift must have nonzero imaginary part (got " +
                    std::to_string(lambda.real()) + ")");
  }
}

std::vector<cplx> resolvent_weights(const EigenDecomposition& eig, cplx lambda) {
  std::vector<cplx> w(eig.dim);
  for (std::size_t k = 0; k < eig.dim; ++k) w[k] = 1.0 / (lambda - eig.values[k]);
  return w;
}

}  // namespace

ComplexMatrix resolvent(const EigenDecomposition& eig, cplx lambda) {
  require_non_real(lambda);
  const auto w = resolvent_weights(eig, lambda);
  std::vector<cplx> entries(eig.dim * eig.dim);
  kernels::omp::spectral_reconstruct(eig.vectors, w, eig.dim, entries);
  return ComplexMatrix(eig.dim, std::move(entries));
}

ComplexMatrix resolvent(const SymMatrix& a, cplx lambda) {
  require_non_real(lambda);
  return resolvent(eig_sym(a), lambda);
}

std::vector<cplx> resolvent_apply(const EigenDecomposition& eig, cplx lambda,
                                  std::span<const double> x) {
  require_non_real(lambda);
  if (x.size() != eig.dim) throw Error(ErrorCode::InvalidArgument, "resolvent_apply: length mismatch");
  const auto w = resolvent_weights(eig, lambda);
  std::vector<cplx> out(eig.dim);
  kernels::omp::spectral_apply(eig.vectors, w, x, eig.dim, out);
  return out;
}

SymMatrix proj_range(const EigenDecomposition& eig, const ToleranceContext& tol) {
  const RankCut cut = select_rank(eig, tol);
  std::vector<double> weights(eig.dim);
  for (std::size_t k = 0; k < eig.dim; ++k) weights[k] = cut.retained[k] ? 1.0 : 0.0;
  std::vector<double> entries(eig.dim * eig.dim);
  kernels::omp::spectral_reconstruct(eig.vectors, weights, eig.dim, entries);
  return SymMatrix::from_rows(eig.dim, entries);
}

SymMatrix proj_kernel(const EigenDecomposition& eig, const ToleranceContext& tol) {
  const SymMatrix range = proj_range(eig, tol);
  const std::size_t n = eig.dim;
  std::vector<double> entries(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) entries[i * n + j] = (i == j ? 1.0 : 0.0) - range(i, j);
  }
  return SymMatrix::from_rows(n, entries);
}

SymMatrix proj_range(const SymMatrix& a, const ToleranceContext& tol) {
  return proj_range(eig_sym(a), tol);
}

SymMatrix proj_kernel(const SymMatrix& a, const ToleranceContext& tol) {
  return proj_kernel(eig_sym(a), tol);
}

double op_norm(const SymMatrix& a) {
  const auto eig = eig_sym(a);
  double r = 0.0;
  for (double v : eig.values) r = std::max(r, std::abs(v));
  return r;
}

std::vector<double> multiply(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::InvalidArgument, "multiply: dimension mismatch");
  std::vector<double> out(a.dim() * a.dim());
  kernels::omp::matmul(a.data(), b.data(), a.dim(), out);
  return out;
}

std::vector<double> multiply(const SymMatrix& a, std::span<const double> x) {
  if (x.size() != a.dim()) throw Error(ErrorCode::InvalidArgument, "multiply: length mismatch");
  std::vector<double> out(a.dim());
  kernels::omp::matvec(a.data(), x, a.dim(), out);
  return out;
}

std::vector<cplx> multiply(const ComplexMatrix& a, std::span<const double> x) {
  if (x.size() != a.dim()) throw Error(ErrorCode::InvalidArgument, "multiply: length mismatch");
  std::vector<cplx> out(a.dim());
  kernels::omp::matvec(a.data(), x, a.dim(), out);
  return out;
}

double frobenius(std::span<const double> entries) {
  double scale = 0.0;
  for (double v : entries) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double v : entries) sum += (v / scale) * (v / scale);
  return scale * std::sqrt(sum);
}

double max_abs(std::span<const double> entries) {
  double m = 0.0;
  for (double v : entries) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace gpinv
