#include "rowspace/rng.hpp"

namespace rowspace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngSpec RngSpec::child(std::uint64_t id) const {
  return RngSpec{master_seed, splitmix64(stream_id ^ splitmix64(id + 0x632be59bd9b4e019ULL))};
}

Rng::Rng(const RngSpec& spec)
    : engine_(splitmix64(spec.master_seed) ^ splitmix64(~spec.stream_id)) {}

double Rng::normal() { return normal_(engine_); }

double Rng::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

Eigen::VectorXd Rng::gaussian_vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

Eigen::MatrixXd Rng::gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  // Column-major fill order is part of the determinism contract.
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal();
  return m;
}

Eigen::VectorXd Rng::unit_sphere(Eigen::Index n) {
  Eigen::VectorXd v = gaussian_vector(n);
  double norm = v.norm();
  while (norm == 0.0) {
    v = gaussian_vector(n);
    norm = v.norm();
  }
  return v / norm;
}

}  // namespace rowspace
