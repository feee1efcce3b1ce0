#include "rowspace/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "rowspace/errors.hpp"

namespace rowspace {

namespace {

struct ThinSvd {
  Matrix U;
  Vector sigma;
  Matrix V1;
};

ThinSvd thin_svd(const Matrix& A, double rank_tol) {
  if (A.rows() == 0 || A.cols() == 0) fail(ErrorCode::InvalidArgument, "empty coefficient matrix");
  if (A.rows() > A.cols())
    fail(ErrorCode::InvalidArgument, "coefficient matrix must satisfy d >= n (got n=" +
                                         std::to_string(A.rows()) + ", d=" + std::to_string(A.cols()) + ")");
  if (!A.allFinite()) fail(ErrorCode::InvalidArgument, "coefficient matrix has non-finite entries");

  Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ThinSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  const double smax = out.sigma(0);
  const double smin = out.sigma(out.sigma.size() - 1);
  if (!(smax > 0.0) || smin <= rank_tol * smax)
    fail(ErrorCode::RankDeficient, "sigma_min/sigma_max = " + std::to_string(smax > 0 ? smin / smax : 0.0));

  const Vector signs = canonicalize_column_signs(out.V1);
  out.U = out.U * signs.asDiagonal();
  return out;
}

}  // namespace

Vector canonicalize_column_signs(Matrix& M) {
  Vector signs = Vector::Ones(M.cols());
  for (Index j = 0; j < M.cols(); ++j) {
    Index imax = 0;
    M.col(j).cwiseAbs().maxCoeff(&imax);
    if (M(imax, j) < 0.0) {
      M.col(j) = -M.col(j);
      signs(j) = -1.0;
    }
  }
  return signs;
}

SvdSplit svd_split(const Matrix& A, double rank_tol) {
  ThinSvd thin = thin_svd(A, rank_tol);
  const Index n = A.rows();
  const Index d = A.cols();

  // The trailing d - n Householder vectors of A^T complete range(A^T) to R^d.
  Matrix V2(d, d - n);
  if (d > n) {
    Eigen::HouseholderQR<Matrix> qr(A.transpose());
    Matrix Q = qr.householderQ();
    V2 = Q.rightCols(d - n);
    canonicalize_column_signs(V2);
  }
  return SvdSplit{std::move(thin.U), std::move(thin.sigma), std::move(thin.V1), std::move(V2)};
}

ProblemInstance::ProblemInstance(Matrix A, Vector b, double rank_tol) {
  if (b.size() != A.rows())
    fail(ErrorCode::DimensionMismatch, "b has length " + std::to_string(b.size()) + " but A has " +
                                           std::to_string(A.rows()) + " rows");
  if (!b.allFinite()) fail(ErrorCode::InvalidArgument, "b has non-finite entries");
  ThinSvd thin = thin_svd(A, rank_tol);
  auto data = std::make_shared<Data>();
  data->theta_star = thin.V1 * (thin.U.transpose() * b).cwiseQuotient(thin.sigma);
  data->A = std::move(A);
  data->b = std::move(b);
  data->U = std::move(thin.U);
  data->sigma = std::move(thin.sigma);
  data->V1 = std::move(thin.V1);
  data_ = std::move(data);
}

double ProblemInstance::b_scale() const {
  const double nb = data_->b.norm();
  return nb > 0.0 ? nb : 1.0;
}

Vector ProblemInstance::row_component(const Vector& y) const {
  return data_->V1 * (data_->V1.transpose() * y);
}

Vector ProblemInstance::kernel_component(const Vector& y) const { return y - row_component(y); }

Matrix ProblemInstance::at_pinv_apply(const Matrix& M) const {
  Matrix t = data_->V1.transpose() * M;
  t = data_->sigma.cwiseInverse().asDiagonal() * t;
  return data_->U * t;
}

Vector min_norm_solution(const ProblemInstance& p) { return p.theta_star(); }

Matrix random_orthonormal_columns(Index d, Index k, Rng& rng) {
  if (d < 1 || k < 0 || k > d) fail(ErrorCode::InvalidArgument, "random_orthonormal_columns needs 0 <= k <= d");
  const Matrix G = rng.gaussian_matrix(d, k);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(d, k);
  // Sign-correcting by diag(R) makes the distribution rotation invariant.
  const Matrix& R = qr.matrixQR();
  for (Index j = 0; j < k; ++j)
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  return Q;
}

Matrix random_orthogonal(Index d, Rng& rng) { return random_orthonormal_columns(d, d, rng); }

Matrix random_orthogonal(Index d, const RngSpec& spec) {
  Rng rng(spec);
  return random_orthogonal(d, rng);
}

ProblemInstance random_problem(Index n, Index d, double cond, const RngSpec& spec) {
  if (n < 1 || d < n) fail(ErrorCode::InvalidArgument, "random_problem needs d >= n >= 1");
  if (!(cond >= 1.0)) fail(ErrorCode::InvalidArgument, "random_problem needs cond >= 1");
  if (n == 1 && cond != 1.0)
    fail(ErrorCode::InvalidArgument, "a single-row system always has condition number 1");

  Rng rng(spec);
  const Matrix U = random_orthogonal(n, rng);
  const Matrix V1 = random_orthonormal_columns(d, n, rng);
  Vector sigma(n);
  for (Index i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(n - 1 - i) / static_cast<double>(n - 1);
    sigma(i) = std::pow(cond, t);
  }
  Matrix A = U * sigma.asDiagonal() * V1.transpose();
  Vector b = rng.unit_sphere(n);
  return ProblemInstance(std::move(A), std::move(b));
}

Norms norms(const Matrix& M) {
  Norms out;
  out.frobenius = M.norm();
  out.spectral = spectral_norm(M);
  return out;
}

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  if (M.cols() == 1) return M.col(0).norm();
  if (M.rows() == 1) return M.row(0).norm();
  Eigen::BDCSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

Vector pinv_solve(const Matrix& M, const Vector& rhs, double rel_tol) {
  if (rhs.size() != M.rows()) fail(ErrorCode::DimensionMismatch, "pinv_solve: rhs length mismatch");
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Vector out = Vector::Zero(M.cols());
  if (s.size() == 0 || s(0) == 0.0) return out;
  const double cut = rel_tol * s(0);
  const Vector coeff = svd.matrixU().transpose() * rhs;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) out += (coeff(i) / s(i)) * svd.matrixV().col(i);
  return out;
}

}  // namespace rowspace
