#pragma once

#include <vector>

#include "rowspace/hidden_one.hpp"
#include "rowspace/linalg.hpp"
#include "rowspace/trace.hpp"

namespace rowspace {

/// Depth-h linear network y = W_1 W_2 ... W_h x, every W_i d x d.
struct LayerStack {
  std::vector<Matrix> weights;
  Vector x;

  int depth() const { return static_cast<int>(weights.size()); }
  Vector product() const;
};

/// Euclidean gradients of 0.5 * ||A W_1 ... W_h x - b||^2.
///
/// Every weight gradient is the rank-one matrix a_j s_{j+1}^T with
/// s_{h+1} = x, s_j = W_j s_{j+1} (suffix products) and a_1 = A^T r,
/// a_{j+1} = W_j^T a_j (prefix products), so one step costs O(h) mat-vecs.
struct DeepGradients {
  Vector y;         // s_1, the effective predictor
  Vector residual;  // A y - b
  std::vector<Vector> left;   // a_1..a_h
  std::vector<Vector> right;  // s_2..s_{h+1}
  Vector grad_x;              // a_{h+1}

  Matrix grad_weight(int j) const { return left[j] * right[j].transpose(); }
};

/// Accepts depth 0, where only grad_x = A^T (A x - b) is produced.
DeepGradients deep_gradients(const std::vector<Matrix>& weights, const Vector& x, const ProblemInstance& p);

/// Simultaneous gradient step of all layers and x from iterate-k values.
LayerStack gd_step_deep(const LayerStack& s, const ProblemInstance& p, double alpha);

struct DeepRun {
  LayerStack state;
  IterateTrace trace;
};

/// Gradient descent for any depth and any initializer.
DeepRun run_deep(const LayerStack& s0, const ProblemInstance& p, const GdConfig& cfg);

/// Depth-2 initialization conserved by gradient descent: W_1 = [A^T v | 0],
/// W_2 = e_1 x^T with x = A^T v / ||A^T v||^2 and u = A A^T v / ||A A^T v||^2.
struct Lemma9Init {
  LayerStack stack;
  /// Witness with W_1 = A^T v x^T W_2^T exactly (v scaled by ||A^T v||^2 relative to the seed).
  Vector v;
  Vector u;
  /// The seed the construction started from.
  Vector seed;
};

/// Builds the construction from a given non-zero seed v and verifies the three
/// structural identities; throws ConstructionFailed if any residual exceeds 1e-10.
Lemma9Init lemma9_construct(const ProblemInstance& p, const Vector& v);

/// Random seed rescaled so ||A^T v|| = 1, which makes ||x0|| = 1 and lets the
/// compact two-layer iteration start from the same v.
Lemma9Init lemma9_init(const ProblemInstance& p, const RngSpec& rng);
Vector draw_lemma9_seed(const ProblemInstance& p, const RngSpec& rng);

struct Theorem12Witness {
  Vector v;
  Vector u;
  double residual_W1 = 0.0;
  double residual_W2 = 0.0;
  double residual_x = 0.0;
};

/// v = (A^T)^+ W_1 W_2 x / ||x||^4, u = A W_1 W_2 x / (||x||^2 ||A W_1||_F^2)
/// and the reconstruction errors of W_1 = A^T v x^T W_2^T, W_2 = W_1^T A^T u x^T
/// and x = W_2^T W_1^T A^T u. Requires depth 2; throws ZeroX when x = 0.
Theorem12Witness check_theorem12(const LayerStack& s, const ProblemInstance& p);

/// Collapsed two-layer iteration; returns rho^4 A^T v.
CompactRun run_algorithm4(const ProblemInstance& p, const GdConfig& cfg, const RngSpec& rng);
CompactRun run_algorithm4(const ProblemInstance& p, const GdConfig& cfg, const Vector& v0);

/// Four statements for a converged depth-2 stack: product = theta*; x is the
/// min-norm solution of (A W_1 W_2) z = b; W_1 is the min-Frobenius solution of
/// A Z (W_2 x) = b; W_2 is the min-Frobenius solution of (A W_1) Z x = b.
BioptReport check_corollary14(const LayerStack& s, const ProblemInstance& p, double tol);

/// W_1 = A^T P + C with P = (A^T)^+ W_1 and A C = 0.
struct StabilityDecomposition {
  Matrix P;
  Matrix C;
};

StabilityDecomposition stability_decompose(const Matrix& W1, const ProblemInstance& p);

/// ||W_2|| ... ||W_h|| * ||x|| * ||C|| in spectral norms; the empty product is 1
/// for depth 1.
double stability_bound(const LayerStack& s, const Matrix& C);

/// W_1 = A^T P_0 + C_0 with ||C_0||_2 = c_norm and the columns of C_0 in ker(A);
/// ||A^T P_0||_2 = 1, W_2..W_h = I and x on the unit sphere. Needs d > n.
LayerStack stability_init(const ProblemInstance& p, int h, double c_norm, const RngSpec& rng);

enum class BaselineKind { Xavier, He, Identity };

/// Xavier: U(-1/sqrt(d), 1/sqrt(d)); He: N(0, 2/d); Identity: W_i = I, x on the sphere.
/// Xavier and He draw x on the unit sphere as well.
LayerStack baseline_init(Index d, int h, BaselineKind kind, const RngSpec& rng);

}  // namespace rowspace
