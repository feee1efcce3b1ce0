#pragma once

#include <map>
#include <vector>

#include "rowspace/linalg.hpp"
#include "rowspace/trace.hpp"

namespace rowspace {

/// A d x d matrix with W W^T = I_d up to 1e-10 in Frobenius norm.
class StiefelPoint {
 public:
  static constexpr double kTolerance = 1e-10;

  /// Throws InvalidArgument when W is not square or not orthogonal.
  explicit StiefelPoint(Matrix W);

  const Matrix& matrix() const { return W_; }
  Index dim() const { return W_.rows(); }
  /// ||W W^T - I||_F
  double orthogonality_defect() const;

 private:
  Matrix W_;
};

/// G - W sym(W^T G), the orthogonal projection onto the tangent space at W
/// under the Euclidean metric of the embedding.
Matrix tangent_project(const StiefelPoint& W, const Matrix& G);

/// Q factor of W + xi with positive diagonal R. Returns W unchanged when
/// xi == 0; throws SingularStep when W + xi is numerically singular.
StiefelPoint qr_retract(const StiefelPoint& W, const Matrix& xi);

/// Hidden layers on Stiefel(d, d) and an unconstrained outer vector.
struct RiemannianState {
  std::vector<StiefelPoint> layers;
  Vector x;

  int depth() const { return static_cast<int>(layers.size()); }
  Vector product() const;
};

/// One step: each W_i moves along -alpha * rgrad and is retracted; x takes a
/// Euclidean gradient step. Depth 0 reduces to plain gradient descent.
RiemannianState riemannian_step(const RiemannianState& s, const ProblemInstance& p, double alpha);

/// ||M M^+ W - W||_F. Throws RankDeficient unless M has full column rank.
double range_distance(const StiefelPoint& W, const Matrix& M);

struct RiemannianRun {
  RiemannianState state;
  IterateTrace trace;
  /// Largest ||W_i W_i^T - I||_F seen over all layers and iterates.
  double max_orthogonality_defect = 0.0;
  /// Largest |prod_i ||W_i||_2 - 1| seen over all iterates.
  double max_norm_product_deviation = 0.0;
};

/// Random orthogonal hidden layers and x on the unit sphere, then
/// riemannian_step until cfg stops the run.
RiemannianState random_riemannian_state(Index d, int h, const RngSpec& rng);
RiemannianRun run_riemannian(const RiemannianState& s0, const ProblemInstance& p, const GdConfig& cfg);
RiemannianRun run_riemannian(const ProblemInstance& p, int h, const GdConfig& cfg, const RngSpec& rng);

struct Histogram {
  std::vector<double> bin_edges;
  std::vector<int> counts;
};

struct TrialStats {
  std::vector<double> distances;  // final ||W_1...W_h x - theta*|| per trial, trial order
  std::map<int, double> percentiles;  // 25, 50, 75
  Histogram histogram;
  double variance = 0.0;  // population variance of distances
  int diverged = 0;

  double fraction_within(double tol) const;
};

/// Percentiles use linear interpolation between order statistics.
TrialStats summarize_trials(std::vector<double> distances, int bins = 20);

/// Trial t of every depth uses rng.child(t); runs are spread over `threads`
/// workers (0 = hardware concurrency) and merged by trial index.
std::map<int, TrialStats> run_trials(const ProblemInstance& p, const std::vector<int>& h_list, int trials,
                                     const GdConfig& cfg, const RngSpec& rng, unsigned threads = 0);

}  // namespace rowspace
