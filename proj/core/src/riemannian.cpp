#include "rowspace/riemannian.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include <Eigen/SVD>

#include "rowspace/deep_linear.hpp"
#include "rowspace/errors.hpp"

namespace rowspace {

StiefelPoint::StiefelPoint(Matrix W) : W_(std::move(W)) {
  if (W_.rows() != W_.cols() || W_.rows() == 0) fail(ErrorCode::InvalidArgument, "Stiefel(d, d) point must be square");
  const double defect = orthogonality_defect();
  if (!(defect <= kTolerance))
    fail(ErrorCode::InvalidArgument, "matrix is not orthogonal (defect " + std::to_string(defect) + ")");
}

double StiefelPoint::orthogonality_defect() const {
  return (W_ * W_.transpose() - Matrix::Identity(W_.rows(), W_.rows())).norm();
}

Matrix tangent_project(const StiefelPoint& W, const Matrix& G) {
  const Matrix& w = W.matrix();
  if (G.rows() != w.rows() || G.cols() != w.cols()) fail(ErrorCode::DimensionMismatch, "tangent_project: shape mismatch");
  const Matrix wtg = w.transpose() * G;
  return G - w * (0.5 * (wtg + wtg.transpose()));
}

StiefelPoint qr_retract(const StiefelPoint& W, const Matrix& xi) {
  const Matrix& w = W.matrix();
  if (xi.rows() != w.rows() || xi.cols() != w.cols()) fail(ErrorCode::DimensionMismatch, "qr_retract: shape mismatch");
  if ((xi.array() == 0.0).all()) return W;
  const Index d = w.rows();
  Eigen::HouseholderQR<Matrix> qr(w + xi);
  const Matrix& R = qr.matrixQR();
  const Vector diag = R.diagonal().cwiseAbs();
  if (!(diag.minCoeff() > 1e-12 * std::max(diag.maxCoeff(), 1.0)))
    fail(ErrorCode::SingularStep, "W + xi is numerically singular");
  Matrix Q = qr.householderQ() * Matrix::Identity(d, d);
  for (Index j = 0; j < d; ++j)
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  return StiefelPoint(std::move(Q));
}

Vector RiemannianState::product() const {
  Vector y = x;
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) y = it->matrix() * y;
  return y;
}

namespace {

std::vector<Matrix> layer_matrices(const RiemannianState& s) {
  std::vector<Matrix> out;
  out.reserve(s.layers.size());
  for (const auto& l : s.layers) out.push_back(l.matrix());
  return out;
}

RiemannianState step_with(const RiemannianState& s, const DeepGradients& g, double alpha) {
  RiemannianState out;
  out.layers.reserve(s.layers.size());
  for (int j = 0; j < s.depth(); ++j) {
    const Matrix xi = -alpha * tangent_project(s.layers[j], g.grad_weight(j));
    out.layers.push_back(qr_retract(s.layers[j], xi));
  }
  out.x = s.x - alpha * g.grad_x;
  return out;
}

}  // namespace

RiemannianState riemannian_step(const RiemannianState& s, const ProblemInstance& p, double alpha) {
  const DeepGradients g = deep_gradients(layer_matrices(s), s.x, p);
  return step_with(s, g, alpha);
}

double range_distance(const StiefelPoint& W, const Matrix& M) {
  if (M.rows() != W.dim()) fail(ErrorCode::DimensionMismatch, "range_distance: M must have d rows");
  if (M.cols() > M.rows() || M.cols() == 0) fail(ErrorCode::RankDeficient, "M must be d x n with 1 <= n <= d");
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  if (!(s(s.size() - 1) > kRankTol * s(0))) fail(ErrorCode::RankDeficient, "M is not of full column rank");
  const Matrix& U = svd.matrixU();
  const Matrix& w = W.matrix();
  return (U * (U.transpose() * w) - w).norm();
}

RiemannianState random_riemannian_state(Index d, int h, const RngSpec& spec) {
  if (h < 0) fail(ErrorCode::InvalidArgument, "depth must be >= 0");
  Rng rng(spec);
  RiemannianState s;
  for (int i = 0; i < h; ++i) s.layers.emplace_back(random_orthogonal(d, rng));
  s.x = rng.unit_sphere(d);
  return s;
}

namespace {

RiemannianRun run_impl(const RiemannianState& s0, const ProblemInstance& p, const GdConfig& cfg, bool track) {
  const double alpha = cfg.resolve_alpha(p);
  RiemannianRun out{s0, {}, 0.0, 0.0};
  RunMonitor monitor(p, cfg, out.trace);
  for (int k = 0;; ++k) {
    RiemannianState& s = out.state;
    if (track) {
      double norm_product = 1.0;
      for (const auto& l : s.layers) {
        out.max_orthogonality_defect = std::max(out.max_orthogonality_defect, l.orthogonality_defect());
        norm_product *= spectral_norm(l.matrix());
      }
      out.max_norm_product_deviation = std::max(out.max_norm_product_deviation, std::abs(norm_product - 1.0));
    }
    const DeepGradients g = deep_gradients(layer_matrices(s), s.x, p);
    if (monitor.record(k, g.y)) break;
    s = step_with(s, g, alpha);
  }
  return out;
}

}  // namespace

RiemannianRun run_riemannian(const RiemannianState& s0, const ProblemInstance& p, const GdConfig& cfg) {
  return run_impl(s0, p, cfg, true);
}

RiemannianRun run_riemannian(const ProblemInstance& p, int h, const GdConfig& cfg, const RngSpec& rng) {
  if (h < 1) fail(ErrorCode::InvalidArgument, "run_riemannian needs h >= 1");
  return run_riemannian(random_riemannian_state(p.d(), h, rng), p, cfg);
}

double TrialStats::fraction_within(double tol) const {
  if (distances.empty()) return 0.0;
  const auto hits = std::count_if(distances.begin(), distances.end(), [tol](double v) { return v <= tol; });
  return static_cast<double>(hits) / static_cast<double>(distances.size());
}

TrialStats summarize_trials(std::vector<double> distances, int bins) {
  if (distances.empty()) fail(ErrorCode::InvalidArgument, "no trials to summarize");
  if (bins < 1) fail(ErrorCode::InvalidArgument, "need at least one histogram bin");
  TrialStats st;
  st.distances = std::move(distances);
  std::vector<double> sorted = st.distances;
  std::sort(sorted.begin(), sorted.end());
  const auto m = sorted.size();
  for (int level : {25, 50, 75}) {
    const double pos = (static_cast<double>(level) / 100.0) * static_cast<double>(m - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, m - 1);
    const double frac = pos - static_cast<double>(lo);
    st.percentiles[level] = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
  }
  double mean = 0.0;
  for (double v : sorted) mean += v;
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (double v : sorted) var += (v - mean) * (v - mean);
  st.variance = var / static_cast<double>(m);

  const double lo = sorted.front();
  const double hi = sorted.back();
  const double width = (hi - lo) / bins;
  st.histogram.bin_edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) st.histogram.bin_edges[i] = lo + width * i;
  st.histogram.bin_edges[bins] = hi;
  st.histogram.counts.assign(bins, 0);
  for (double v : sorted) {
    int idx = width > 0.0 ? static_cast<int>((v - lo) / width) : 0;
    st.histogram.counts[std::clamp(idx, 0, bins - 1)]++;
  }
  return st;
}

std::map<int, TrialStats> run_trials(const ProblemInstance& p, const std::vector<int>& h_list, int trials,
                                     const GdConfig& cfg, const RngSpec& rng, unsigned threads) {
  if (trials < 1) fail(ErrorCode::InvalidArgument, "trials must be >= 1");
  for (int h : h_list)
    if (h < 1) fail(ErrorCode::InvalidArgument, "every depth must be >= 1");
  cfg.validate();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  const std::size_t jobs = h_list.size() * static_cast<std::size_t>(trials);
  std::vector<double> dist(jobs, 0.0);
  std::vector<char> diverged(jobs, 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      const int h = h_list[job / trials];
      const auto t = static_cast<std::uint64_t>(job % trials);
      const RiemannianRun run = run_impl(random_riemannian_state(p.d(), h, rng.child(t)), p, cfg, false);
      dist[job] = run.trace.records.empty() ? (run.state.product() - p.theta_star()).norm()
                                            : run.trace.last().dist_theta_star;
      diverged[job] = run.trace.terminated_by == Termination::Diverged;
    }
  };
  std::vector<std::thread> pool;
  const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::map<int, TrialStats> out;
  for (std::size_t hi = 0; hi < h_list.size(); ++hi) {
    const auto begin = dist.begin() + static_cast<std::ptrdiff_t>(hi * trials);
    TrialStats st = summarize_trials(std::vector<double>(begin, begin + trials));
    st.diverged = static_cast<int>(std::count(diverged.begin() + static_cast<std::ptrdiff_t>(hi * trials),
                                              diverged.begin() + static_cast<std::ptrdiff_t>((hi + 1) * trials), 1));
    out[h_list[hi]] = std::move(st);
  }
  return out;
}

}  // namespace rowspace
