#pragma once

#include <memory>

#include <Eigen/Dense>

#include "rowspace/rng.hpp"

namespace rowspace {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Relative singular-value threshold below which a coefficient matrix is
/// treated as rank deficient.
inline constexpr double kRankTol = 1e-10;

/// Factors of A = U * diag(sigma) * V1^T with V2 an orthonormal basis of ker(A).
/// Singular values are sorted descending. Each column of V1 and V2 has its
/// largest-magnitude entry positive; U is sign-matched to V1.
struct SvdSplit {
  Matrix U;      // n x n
  Vector sigma;  // n
  Matrix V1;     // d x n, spans range(A^T)
  Matrix V2;     // d x (d - n), spans ker(A)
};

/// Full factor bundle. Throws RankDeficient when sigma_min <= rank_tol * sigma_max
/// and InvalidArgument when A has more rows than columns.
SvdSplit svd_split(const Matrix& A, double rank_tol = kRankTol);

/// An underdetermined system A y = b with A of full row rank.
///
/// Construction validates the shape and rank of A and caches the thin
/// factorization, the minimum-norm solution and the spectral norm. The cached
/// state is immutable and shared, so copies are cheap and thread-safe.
class ProblemInstance {
 public:
  ProblemInstance(Matrix A, Vector b, double rank_tol = kRankTol);

  const Matrix& A() const { return data_->A; }
  const Vector& b() const { return data_->b; }
  Index n() const { return data_->A.rows(); }
  Index d() const { return data_->A.cols(); }

  const Vector& theta_star() const { return data_->theta_star; }
  const Vector& singular_values() const { return data_->sigma; }
  const Matrix& left_factor() const { return data_->U; }
  /// Orthonormal basis V1 of range(A^T).
  const Matrix& row_basis() const { return data_->V1; }

  double spectral_norm() const { return data_->sigma(0); }
  double condition_number() const { return data_->sigma(0) / data_->sigma(n() - 1); }
  /// ||b||, or 1 when b = 0, so relative tolerances stay meaningful.
  double b_scale() const;

  /// Orthogonal projection V1 V1^T y onto range(A^T).
  Vector row_component(const Vector& y) const;
  /// (I - V1 V1^T) y, the ker(A) component; equals V2 V2^T y.
  Vector kernel_component(const Vector& y) const;
  /// (A^T)^+ M = U diag(sigma)^{-1} V1^T M.
  Matrix at_pinv_apply(const Matrix& M) const;

 private:
  struct Data {
    Matrix A;
    Vector b;
    Matrix U;
    Vector sigma;
    Matrix V1;
    Vector theta_star;
  };
  std::shared_ptr<const Data> data_;
};

/// theta* = argmin ||y|| subject to A y = b, computed as V1 Sigma^{-1} U^T b.
Vector min_norm_solution(const ProblemInstance& p);

/// Random instance with singular values log-spaced from 1 to cond and Haar
/// distributed factors; b is a normalized Gaussian draw.
ProblemInstance random_problem(Index n, Index d, double cond, const RngSpec& rng);

/// Haar-distributed orthogonal matrix (QR of a Gaussian with sign-corrected R).
Matrix random_orthogonal(Index d, const RngSpec& rng);
Matrix random_orthogonal(Index d, Rng& rng);
/// d x k matrix with orthonormal columns, k <= d.
Matrix random_orthonormal_columns(Index d, Index k, Rng& rng);

struct Norms {
  double spectral = 0.0;
  double frobenius = 0.0;
};

Norms norms(const Matrix& M);
double spectral_norm(const Matrix& M);

/// Minimum-norm least-squares solution of M z = rhs; singular values below
/// rel_tol * sigma_max are treated as zero.
Vector pinv_solve(const Matrix& M, const Vector& rhs, double rel_tol = 1e-10);

/// Flips column signs so that each column's largest-magnitude entry is
/// positive. Returns the applied signs.
Vector canonicalize_column_signs(Matrix& M);

}  // namespace rowspace
