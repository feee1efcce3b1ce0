#pragma once

#include <string>
#include <vector>

#include "rowspace/linalg.hpp"
#include "rowspace/trace.hpp"

namespace rowspace {

/// One hidden layer: predictor y = W x with W d x d.
struct HiddenPair {
  Matrix W;
  Vector x;

  Vector product() const { return W * x; }
};

/// Simultaneous gradient step on 0.5 * ||A W x - b||^2; both gradients are
/// evaluated at the incoming (W, x).
HiddenPair gd_step_hidden(const HiddenPair& s, const ProblemInstance& p, double alpha);

/// The seed vectors of a bi-optimal initialization: v0 scaled so the initial
/// prediction A W0 x0 = A A^T v0 has the norm of b, x0 on the unit sphere.
struct BioptSeed {
  Vector v0;
  Vector x0;
};

/// Draws (v0, x0) from `rng`. Algorithms 2 and 3 draw the identical seed from
/// the same spec, so their trajectories match run_hidden from biopt_init.
BioptSeed draw_biopt_seed(const ProblemInstance& p, const RngSpec& rng);

/// W0 = A^T v0 x0^T.
HiddenPair biopt_from(const ProblemInstance& p, const Vector& v0, const Vector& x0);
HiddenPair biopt_init(const ProblemInstance& p, const RngSpec& rng);

struct HiddenRun {
  HiddenPair state;
  IterateTrace trace;
};

/// Full gradient descent over (W, x). Stops with SaddleStop when both gradients
/// vanish while the residual is still above tolerance.
HiddenRun run_hidden(const HiddenPair& s0, const ProblemInstance& p, const GdConfig& cfg);

struct Theorem6Check {
  Vector v_hat;
  double residual = 0.0;
};

/// Reconstructs v_hat = (A^T)^+ W x / ||x||^2 and measures ||W - A^T v_hat x^T||_F.
/// Throws ZeroX when x = 0.
Theorem6Check check_theorem6(const HiddenPair& s, const ProblemInstance& p);

/// Residual of one minimality statement together with its verdict.
struct MinimalityStatement {
  std::string name;
  double residual = 0.0;
  bool pass = false;
};

struct BioptReport {
  std::vector<MinimalityStatement> statements;

  bool all_pass() const;
};

/// Three statements: W x = theta*; x is the min-norm solution of (A W) z = b;
/// W is the min-Frobenius solution of A Z x = b, i.e. theta* x^T / ||x||^2.
/// Throws NotInterpolant when ||A W x - b|| > tol * ||b|| and ZeroX when x = 0.
BioptReport check_bioptimality(const HiddenPair& s, const ProblemInstance& p, double tol);

/// Reduced iteration over (x, v) with W = A^T v x^T; d + n numbers of state.
struct ReducedState {
  Vector x;
  Vector v;

  static constexpr int state_size(Index n, Index d) { return static_cast<int>(n + d); }
};

struct Algorithm2Run {
  HiddenPair state;
  ReducedState reduced;
  IterateTrace trace;
};

Algorithm2Run run_algorithm2(const ProblemInstance& p, const GdConfig& cfg, const RngSpec& rng);
Algorithm2Run run_algorithm2(const ProblemInstance& p, const GdConfig& cfg, const Vector& v0, const Vector& x0);

/// Collapsed one-hidden-layer state. The iteration itself only needs (v, rho)
/// and the last gamma: n + 2 numbers. z caches A^T v.
struct CompactState {
  Vector v;
  double rho = 1.0;
  double gamma = 0.0;
  Vector z;

  static constexpr int state_size(Index n) { return static_cast<int>(n + 2); }
};

struct CompactRun {
  Vector theta_hat;
  CompactState state;
  IterateTrace trace;
};

/// Compact O(n)-state iteration equivalent to full one-hidden-layer gradient
/// descent from biopt_init with ||x0|| = 1. Returns rho^2 A^T v.
/// Throws GammaSingular when |1 - gamma| < 1e-14.
CompactRun run_algorithm3(const ProblemInstance& p, const GdConfig& cfg, const RngSpec& rng);
CompactRun run_algorithm3(const ProblemInstance& p, const GdConfig& cfg, const Vector& v0);

inline constexpr double kGammaGuard = 1e-14;

}  // namespace rowspace
