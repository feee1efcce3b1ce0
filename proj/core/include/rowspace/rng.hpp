#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace rowspace {

/// Identifies one reproducible random stream. Two generators built from equal
/// specs produce bit-identical draws.
struct RngSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  /// Derives an independent sub-stream, e.g. one per trial.
  RngSpec child(std::uint64_t id) const;

  friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

class Rng {
 public:
  explicit Rng(const RngSpec& spec);

  double normal();
  double uniform(double lo, double hi);

  Eigen::VectorXd gaussian_vector(Eigen::Index n);
  Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols);
  /// Uniform on the unit sphere S^{n-1}.
  Eigen::VectorXd unit_sphere(Eigen::Index n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace rowspace
