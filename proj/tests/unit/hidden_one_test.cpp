#include <gtest/gtest.h>

#include "rowspace/errors.hpp"
#include "rowspace/hidden_one.hpp"

namespace rowspace {
namespace {

Matrix row11() {
  Matrix A(1, 2);
  A << 1, 1;
  return A;
}

// Full one-hidden-layer gradient step written out independently of the library.
void oracle_step(Matrix& W, Vector& x, const ProblemInstance& p, double alpha) {
  const Vector r = p.A() * (W * x) - p.b();
  const Vector g = p.A().transpose() * r;
  const Matrix W_next = W - alpha * g * x.transpose();
  x = x - alpha * W.transpose() * g;
  W = W_next;
}

double default_alpha(const ProblemInstance& p) { return 1.0 / (p.spectral_norm() * p.spectral_norm()); }

GdConfig converge_cfg() {
  GdConfig cfg;
  cfg.max_iters = 2000000;
  cfg.tol_residual = 1e-12;
  return cfg;
}

TEST(HiddenStep, HandEvaluatedStepFromZeroX) {
  // grad_x = W^T A^T (A W x - b) = (-2, -2) for the half-squared loss.
  const ProblemInstance p(row11(), Vector::Constant(1, 2));
  const HiddenPair out = gd_step_hidden({Matrix::Identity(2, 2), Vector::Zero(2)}, p, 0.1);
  EXPECT_LE((out.x - Eigen::Vector2d(0.2, 0.2)).norm(), 1e-15);
  EXPECT_EQ(out.W, Matrix::Identity(2, 2));
}

TEST(HiddenStep, TrivialSaddleAndInterpolantAreFixed) {
  const ProblemInstance p = random_problem(2, 5, 3.0, {1, 0});
  const HiddenPair zero{Matrix::Zero(5, 5), Vector::Zero(5)};
  const HiddenPair out = gd_step_hidden(zero, p, 0.1);
  EXPECT_EQ(out.W.norm(), 0.0);
  EXPECT_EQ(out.x.norm(), 0.0);
  const Vector x = Rng({1, 1}).unit_sphere(5);
  const HiddenPair sol{p.theta_star() * x.transpose(), x};
  const HiddenPair same = gd_step_hidden(sol, p, 0.1);
  EXPECT_LE((same.W - sol.W).norm(), 1e-14);
  EXPECT_LE((same.x - sol.x).norm(), 1e-14);
}

TEST(HiddenRun, ZeroStartIsSaddle) {
  const ProblemInstance p = random_problem(2, 5, 3.0, {1, 0});
  const HiddenRun r = run_hidden({Matrix::Zero(5, 5), Vector::Zero(5)}, p, GdConfig{});
  EXPECT_EQ(r.trace.terminated_by, Termination::SaddleStop);
  EXPECT_EQ(r.trace.iterations(), 0);
}

TEST(BioptInit, HandConstruction) {
  const ProblemInstance p(row11(), Vector::Constant(1, 1));
  const HiddenPair s = biopt_from(p, Vector::Constant(1, 1), Eigen::Vector2d(1, 0));
  Matrix expected(2, 2);
  expected << 1, 0, 1, 0;
  EXPECT_EQ(s.W, expected);
}

TEST(BioptInit, RankOneInRowSpaceWithUnitX) {
  const ProblemInstance p = random_problem(3, 9, 4.0, {2, 0});
  const HiddenPair s = biopt_init(p, {2, 1});
  EXPECT_NEAR(s.x.norm(), 1.0, 1e-12);
  Eigen::JacobiSVD<Matrix> svd(s.W);
  EXPECT_LE(svd.singularValues()(1), 1e-12 * svd.singularValues()(0));
  for (Index j = 0; j < 9; ++j) EXPECT_LE(p.kernel_component(s.W.col(j)).norm(), 1e-12);
  EXPECT_LE(check_theorem6(s, p).residual, 1e-12);
}

TEST(Theorem6, IdentityIsNotARankOneRowSpaceProduct) {
  const ProblemInstance p(row11(), Vector::Constant(1, 1));
  EXPECT_GT(check_theorem6({Matrix::Identity(2, 2), Eigen::Vector2d(1, 0)}, p).residual, 0.5);
  try {
    check_theorem6({Matrix::Identity(2, 2), Vector::Zero(2)}, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroX);
  }
}

TEST(Theorem6, StructureConservedAlongTrajectory) {
  for (std::uint64_t t = 0; t < 3; ++t) {
    const ProblemInstance p = random_problem(4, 16, 10.0, {3, t});
    HiddenPair s = biopt_init(p, {3, 100 + t});
    const double alpha = default_alpha(p);
    for (int k = 0; k < 1000; ++k) {
      s = gd_step_hidden(s, p, alpha);
      ASSERT_LE(check_theorem6(s, p).residual, 1e-8 * s.W.norm()) << "step " << k;
    }
  }
}

TEST(Theorem6, KernelPartOfWIsConserved) {
  const ProblemInstance p = random_problem(3, 10, 5.0, {4, 0});
  Rng rng({4, 1});
  HiddenPair s{rng.gaussian_matrix(10, 10) * 0.1, rng.unit_sphere(10)};
  auto kernel_part = [&](const Matrix& W) {
    Matrix K(W.rows(), W.cols());
    for (Index j = 0; j < W.cols(); ++j) K.col(j) = p.kernel_component(W.col(j));
    return K;
  };
  const Matrix K0 = kernel_part(s.W);
  for (int k = 0; k < 200; ++k) s = gd_step_hidden(s, p, default_alpha(p));
  EXPECT_LE((kernel_part(s.W) - K0).norm(), 1e-11);
}

TEST(Theorem6, ZeroXCourseCorrects) {
  const ProblemInstance p = random_problem(3, 8, 4.0, {5, 0});
  Rng rng({5, 1});
  // A state that has just landed on x = 0 with W still a row-space outer product.
  const Vector dir = rng.unit_sphere(8);
  HiddenPair s{(p.A().transpose() * rng.gaussian_vector(3)) * dir.transpose(), Vector::Zero(8)};
  s = gd_step_hidden(s, p, 0.01);
  s = gd_step_hidden(s, p, 0.01);
  ASSERT_GT(s.x.norm(), 0.0);
  EXPECT_LE(check_theorem6(s, p).residual, 1e-10 * s.W.norm());
}

TEST(HiddenRun, RowSpaceStartConvergesToMinNorm) {
  const ProblemInstance p = random_problem(3, 10, 5.0, {6, 0});
  const HiddenRun r = run_hidden(biopt_init(p, {6, 1}), p, converge_cfg());
  ASSERT_EQ(r.trace.terminated_by, Termination::Residual);
  EXPECT_LE((r.state.product() - p.theta_star()).norm(), 1e-6);
  const BioptReport rep = check_bioptimality(r.state, p, 1e-6);
  ASSERT_EQ(rep.statements.size(), 3u);
  EXPECT_TRUE(rep.all_pass());
}

TEST(HiddenRun, GaussianStartMissesMinNorm) {
  const ProblemInstance p = random_problem(3, 10, 5.0, {7, 0});
  Rng rng({7, 1});
  const HiddenRun r = run_hidden({rng.gaussian_matrix(10, 10) * 0.3, rng.unit_sphere(10)}, p, converge_cfg());
  ASSERT_EQ(r.trace.terminated_by, Termination::Residual);
  EXPECT_GT(p.kernel_component(r.state.product()).norm(), 1e-3);
  EXPECT_FALSE(check_bioptimality(r.state, p, 1e-6).statements[0].pass);
}

TEST(Bioptimality, KernelShiftedInterpolantFailsFirstStatement) {
  const ProblemInstance p = random_problem(2, 6, 3.0, {8, 0});
  const Vector x = Rng({8, 1}).unit_sphere(6);
  const Vector shift = p.kernel_component(Rng({8, 2}).gaussian_vector(6));
  const HiddenPair s{(p.theta_star() + shift) * x.transpose(), x};
  const BioptReport rep = check_bioptimality(s, p, 1e-6);
  EXPECT_FALSE(rep.statements[0].pass);
  EXPECT_NEAR(rep.statements[0].residual, shift.norm(), 1e-10);
}

TEST(Bioptimality, RequiresInterpolant) {
  const ProblemInstance p = random_problem(2, 6, 3.0, {8, 0});
  try {
    check_bioptimality({Matrix::Identity(6, 6), Vector::Ones(6)}, p, 1e-6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInterpolant);
  }
}

TEST(Algorithm2, MatchesFullGradientDescent) {
  const ProblemInstance p = random_problem(4, 12, 8.0, {9, 0});
  const BioptSeed seed = draw_biopt_seed(p, {9, 1});
  GdConfig cfg;
  cfg.max_iters = 60;
  cfg.tol_residual = 0;
  cfg.snapshot_every = 1;
  const Algorithm2Run a2 = run_algorithm2(p, cfg, seed.v0, seed.x0);
  HiddenPair full = biopt_from(p, seed.v0, seed.x0);
  Matrix W = full.W;
  Vector x = full.x;
  ASSERT_EQ(a2.trace.snapshots.size(), 61u);
  for (const Snapshot& snap : a2.trace.snapshots) {
    EXPECT_LE((snap.y - W * x).norm(), 1e-10) << "k=" << snap.k;
    oracle_step(W, x, p, default_alpha(p));
  }
  EXPECT_EQ(ReducedState::state_size(4, 12), 16);
}

TEST(Algorithm3, MatchesFullGradientDescent) {
  for (std::uint64_t t = 0; t < 5; ++t) {
    const ProblemInstance p = random_problem(3 + t, 15, 10.0, {10, t});
    const BioptSeed seed = draw_biopt_seed(p, {10, 100 + t});
    GdConfig cfg;
    cfg.max_iters = 50;
    cfg.tol_residual = 0;
    cfg.snapshot_every = 1;
    const CompactRun a3 = run_algorithm3(p, cfg, RngSpec{10, 100 + t});
    Matrix W = biopt_from(p, seed.v0, seed.x0).W;
    Vector x = seed.x0;
    ASSERT_EQ(a3.trace.snapshots.size(), 51u);
    for (const Snapshot& snap : a3.trace.snapshots) {
      EXPECT_LE((snap.y - W * x).norm(), 1e-8) << "k=" << snap.k;
      oracle_step(W, x, p, default_alpha(p));
    }
    for (const auto& rec : a3.trace.records) {
      EXPECT_TRUE(rec.gamma.has_value());
      EXPECT_TRUE(rec.rho.has_value());
    }
  }
  EXPECT_EQ(CompactState::state_size(7), 9);
}

TEST(Algorithm3, ConvergesToMinNorm) {
  const ProblemInstance p = random_problem(5, 20, 10.0, {11, 0});
  const CompactRun a3 = run_algorithm3(p, converge_cfg(), RngSpec{11, 1});
  ASSERT_EQ(a3.trace.terminated_by, Termination::Residual);
  EXPECT_LE((a3.theta_hat - p.theta_star()).norm(), 1e-6 * p.theta_star().norm());
  EXPECT_LE((a3.state.z - p.A().transpose() * a3.state.v).norm(), 1e-12 * a3.state.z.norm());
}

TEST(Algorithm3, GammaOneIsRejected) {
  // With y = A z = 1, b = 0 and alpha = 1 the first gamma is exactly 1.
  Matrix A(1, 1);
  A << 1;
  const ProblemInstance p(A, Vector::Zero(1));
  GdConfig cfg;
  cfg.alpha = 1.0;
  try {
    run_algorithm3(p, cfg, Vector::Ones(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GammaSingular);
  }
}

}  // namespace
}  // namespace rowspace
