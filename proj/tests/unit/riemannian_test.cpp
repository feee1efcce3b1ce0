#include <cmath>

#include <gtest/gtest.h>

#include "rowspace/errors.hpp"
#include "rowspace/gd_flat.hpp"
#include "rowspace/riemannian.hpp"

namespace rowspace {
namespace {

ProblemInstance small_problem() {
  Matrix A(2, 3);
  A << 5, -3, 1, 3, 1, -1;
  return ProblemInstance(A, Eigen::Vector2d(6, 4));
}

TEST(Stiefel, RejectsNonOrthogonal) {
  EXPECT_THROW(StiefelPoint(Matrix::Ones(2, 2)), Error);
  EXPECT_THROW(StiefelPoint(Matrix::Identity(3, 2)), Error);
  EXPECT_NO_THROW(StiefelPoint(Matrix::Identity(3, 3)));
}

TEST(TangentProjection, HandExample) {
  Matrix G(2, 2);
  G << 1, 2, 3, 4;
  Matrix expected(2, 2);
  expected << 0, -0.5, 0.5, 0;
  EXPECT_LE((tangent_project(StiefelPoint(Matrix::Identity(2, 2)), G) - expected).norm(), 1e-15);
}

TEST(TangentProjection, IdempotentAndTangent) {
  const StiefelPoint W(random_orthogonal(6, RngSpec{1, 0}));
  Rng rng({1, 1});
  const Matrix G = rng.gaussian_matrix(6, 6);
  const Matrix xi = tangent_project(W, G);
  const Matrix& M = W.matrix();
  EXPECT_LE((M * xi.transpose() + xi * M.transpose()).norm(), 1e-10);
  EXPECT_LE((tangent_project(W, xi) - xi).norm(), 1e-12);
  EXPECT_LE(tangent_project(W, M).norm(), 1e-12);
  const Matrix S = rng.gaussian_matrix(6, 6);
  const Matrix tangent = M * (S - S.transpose());
  EXPECT_LE((tangent_project(W, tangent) - tangent).norm(), 1e-12);
}

TEST(QrRetraction, ZeroStepAndOrthogonality) {
  const StiefelPoint W(random_orthogonal(5, RngSpec{2, 0}));
  EXPECT_EQ(qr_retract(W, Matrix::Zero(5, 5)).matrix(), W.matrix());
  const Matrix xi = tangent_project(W, Rng({2, 1}).gaussian_matrix(5, 5));
  EXPECT_LE(qr_retract(W, 0.3 * xi).orthogonality_defect(), 1e-12);
}

TEST(QrRetraction, SmallRotation) {
  const double t = 1e-3;
  Matrix xi(2, 2);
  xi << 0, -t, t, 0;
  Matrix rot(2, 2);
  rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  const Matrix out = qr_retract(StiefelPoint(Matrix::Identity(2, 2)), xi).matrix();
  EXPECT_LE((out - rot).norm(), t * t);
}

TEST(QrRetraction, SingularStepRejected) {
  try {
    qr_retract(StiefelPoint(Matrix::Identity(2, 2)), -Matrix::Identity(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularStep);
  }
}

TEST(RangeDistance, MatchesDimensionFormula) {
  Rng rng({3, 0});
  for (int d : {3, 10, 17}) {
    for (int n = 1; n < d; n += 2) {
      const StiefelPoint W(random_orthogonal(d, rng));
      EXPECT_NEAR(range_distance(W, rng.gaussian_matrix(d, n)), std::sqrt(double(d - n)), 1e-10);
    }
    EXPECT_NEAR(range_distance(StiefelPoint(Matrix::Identity(d, d)), rng.gaussian_matrix(d, d)), 0.0, 1e-10);
  }
  EXPECT_NEAR(range_distance(StiefelPoint(random_orthogonal(10, rng)), rng.gaussian_matrix(10, 3)),
              2.6457513110645906, 1e-10);
  EXPECT_THROW(range_distance(StiefelPoint(Matrix::Identity(3, 3)), Matrix::Zero(3, 2)), Error);
}

TEST(RiemannianStep, DepthZeroIsPlainGradientStep) {
  const ProblemInstance p = random_problem(2, 6, 3.0, {4, 0});
  const Vector x = Rng({4, 1}).gaussian_vector(6);
  const RiemannianState out = riemannian_step({{}, x}, p, 0.05);
  EXPECT_LE((out.x - gd_step(x, p, 0.05)).norm(), 1e-14);
}

TEST(RiemannianStep, InterpolantIsFixed) {
  const ProblemInstance p = small_problem();
  RiemannianState s = random_riemannian_state(3, 2, {5, 0});
  // Choose x so the product is exactly theta*.
  s.x = s.layers[1].matrix().transpose() * (s.layers[0].matrix().transpose() * p.theta_star());
  const RiemannianState out = riemannian_step(s, p, 0.01);
  for (int i = 0; i < 2; ++i) EXPECT_LE((out.layers[i].matrix() - s.layers[i].matrix()).norm(), 1e-12);
  EXPECT_LE((out.x - s.x).norm(), 1e-12);
}

TEST(RunRiemannian, InvariantsAlongTrajectory) {
  const ProblemInstance p = small_problem();
  GdConfig cfg;
  cfg.max_iters = 3000;
  cfg.alpha = 1e-3;
  for (std::uint64_t t = 0; t < 4; ++t) {
    const RiemannianRun r = run_riemannian(p, 3, cfg, {6, t});
    EXPECT_LE(r.max_orthogonality_defect, 1e-8);
    EXPECT_LE(r.max_norm_product_deviation, 1e-8);
    EXPECT_NE(r.trace.terminated_by, Termination::Diverged);
  }
}

TEST(RunRiemannian, LossDecreasesWithSmallStep) {
  const ProblemInstance p = random_problem(3, 6, 3.0, {7, 0});
  GdConfig cfg;
  cfg.max_iters = 500;
  cfg.alpha = 1e-3 / (p.spectral_norm() * p.spectral_norm());
  const RiemannianRun r = run_riemannian(p, 2, cfg, {7, 1});
  for (std::size_t i = 1; i < r.trace.records.size(); ++i)
    EXPECT_LE(r.trace.records[i].residual, r.trace.records[i - 1].residual * (1 + 1e-12));
}

TEST(TrialStats, SingleTrialAndPercentiles) {
  const TrialStats one = summarize_trials({0.7}, 5);
  for (const auto& [level, v] : one.percentiles) EXPECT_EQ(v, 0.7);
  EXPECT_EQ(one.variance, 0.0);

  const TrialStats s = summarize_trials({4, 1, 3, 2, 5}, 4);
  EXPECT_DOUBLE_EQ(s.percentiles.at(25), 2.0);
  EXPECT_DOUBLE_EQ(s.percentiles.at(50), 3.0);
  EXPECT_DOUBLE_EQ(s.percentiles.at(75), 4.0);
  EXPECT_DOUBLE_EQ(s.variance, 2.0);
  int total = 0;
  for (int c : s.histogram.counts) total += c;
  EXPECT_EQ(total, 5);
  EXPECT_EQ(s.histogram.bin_edges.size(), s.histogram.counts.size() + 1);
  EXPECT_DOUBLE_EQ(s.fraction_within(2.5), 0.4);
}

TEST(Trials, DeterministicAndThreadInvariant) {
  const ProblemInstance p = small_problem();
  GdConfig cfg;
  cfg.max_iters = 400;
  cfg.alpha = 1e-2;
  const auto a = run_trials(p, {1, 3}, 12, cfg, {8, 2}, 1);
  const auto b = run_trials(p, {1, 3}, 12, cfg, {8, 2}, 4);
  ASSERT_EQ(a.size(), 2u);
  for (int h : {1, 3}) {
    EXPECT_EQ(a.at(h).distances, b.at(h).distances);
    EXPECT_EQ(a.at(h).distances.size(), 12u);
    EXPECT_LE(a.at(h).percentiles.at(25), a.at(h).percentiles.at(50));
    EXPECT_LE(a.at(h).percentiles.at(50), a.at(h).percentiles.at(75));
  }
}

}  // namespace
}  // namespace rowspace
