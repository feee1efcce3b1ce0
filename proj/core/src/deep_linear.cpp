#include "rowspace/deep_linear.hpp"

#include <cmath>
#include <string>

#include "rowspace/errors.hpp"

namespace rowspace {

namespace {

// Gradient norm, relative to ||A|| * ||Ay - b||, below which a point counts as a saddle.
constexpr double kSaddleTol = 1e-10;
constexpr double kConstructionTol = 1e-10;

void check_dims(const std::vector<Matrix>& weights, const Vector& x, const ProblemInstance& p) {
  if (x.size() != p.d()) fail(ErrorCode::DimensionMismatch, "x must have length d");
  for (const auto& W : weights)
    if (W.rows() != p.d() || W.cols() != p.d()) fail(ErrorCode::DimensionMismatch, "hidden weights must be d x d");
}

double relative(double residual, double scale) { return scale > 0.0 ? residual / scale : residual; }

}  // namespace

Vector LayerStack::product() const {
  Vector y = x;
  for (auto it = weights.rbegin(); it != weights.rend(); ++it) y = *it * y;
  return y;
}

DeepGradients deep_gradients(const std::vector<Matrix>& weights, const Vector& x, const ProblemInstance& p) {
  check_dims(weights, x, p);
  const std::size_t h = weights.size();
  DeepGradients g;
  g.right.resize(h);
  g.left.resize(h);
  Vector s = x;
  for (std::size_t j = h; j-- > 0;) {
    g.right[j] = s;
    s = weights[j] * s;
  }
  g.y = std::move(s);
  g.residual = p.A() * g.y - p.b();
  Vector a = p.A().transpose() * g.residual;
  for (std::size_t j = 0; j < h; ++j) {
    g.left[j] = a;
    a = weights[j].transpose() * a;
  }
  g.grad_x = std::move(a);
  return g;
}

LayerStack gd_step_deep(const LayerStack& s, const ProblemInstance& p, double alpha) {
  if (s.depth() < 1) fail(ErrorCode::InvalidArgument, "gd_step_deep needs depth >= 1");
  const DeepGradients g = deep_gradients(s.weights, s.x, p);
  LayerStack out = s;
  for (int j = 0; j < s.depth(); ++j) out.weights[j] = s.weights[j] - alpha * g.grad_weight(j);
  out.x = s.x - alpha * g.grad_x;
  return out;
}

DeepRun run_deep(const LayerStack& s0, const ProblemInstance& p, const GdConfig& cfg) {
  if (s0.depth() < 1) fail(ErrorCode::InvalidArgument, "run_deep needs depth >= 1");
  check_dims(s0.weights, s0.x, p);
  const double alpha = cfg.resolve_alpha(p);
  DeepRun out{s0, {}};
  RunMonitor monitor(p, cfg, out.trace);
  for (int k = 0;; ++k) {
    LayerStack& s = out.state;
    const DeepGradients g = deep_gradients(s.weights, s.x, p);
    if (monitor.record(k, g.y)) break;
    double grad_sq = g.grad_x.squaredNorm();
    for (int j = 0; j < s.depth(); ++j) grad_sq += g.left[j].squaredNorm() * g.right[j].squaredNorm();
    if (std::sqrt(grad_sq) <= kSaddleTol * p.spectral_norm() * g.residual.norm()) {
      monitor.stop(Termination::SaddleStop);
      break;
    }
    for (int j = 0; j < s.depth(); ++j) s.weights[j].noalias() -= alpha * (g.left[j] * g.right[j].transpose());
    s.x -= alpha * g.grad_x;
  }
  return out;
}

Lemma9Init lemma9_construct(const ProblemInstance& p, const Vector& v) {
  if (v.size() != p.n()) fail(ErrorCode::DimensionMismatch, "lemma9 seed must have length n");
  if (v.squaredNorm() == 0.0) fail(ErrorCode::InvalidArgument, "lemma9 seed must be non-zero");
  const Index d = p.d();
  const Vector atv = p.A().transpose() * v;
  const Vector aatv = p.A() * atv;
  const double atv_sq = atv.squaredNorm();

  Lemma9Init out;
  out.seed = v;
  out.stack.x = atv / atv_sq;
  out.u = aatv / aatv.squaredNorm();
  Matrix W1 = Matrix::Zero(d, d);
  W1.col(0) = atv;
  Matrix W2 = (W1.transpose() * (p.A().transpose() * out.u)) * out.stack.x.transpose();
  out.stack.weights = {std::move(W1), std::move(W2)};
  out.v = v * atv_sq;

  const Matrix& w1 = out.stack.weights[0];
  const Matrix& w2 = out.stack.weights[1];
  const Vector& x = out.stack.x;
  const Vector atu = p.A().transpose() * out.u;
  const double r1 = relative((w1 - (p.A().transpose() * out.v) * (w2 * x).transpose()).norm(), w1.norm());
  const double r2 = relative((w2 - (w1.transpose() * atu) * x.transpose()).norm(), w2.norm());
  const double r3 = relative((x - w2.transpose() * (w1.transpose() * atu)).norm(), x.norm());
  if (r1 > kConstructionTol || r2 > kConstructionTol || r3 > kConstructionTol)
    fail(ErrorCode::ConstructionFailed, "identity residuals " + std::to_string(r1) + ", " + std::to_string(r2) +
                                            ", " + std::to_string(r3));
  return out;
}

Vector draw_lemma9_seed(const ProblemInstance& p, const RngSpec& spec) {
  Rng rng(spec);
  Vector v;
  do {
    v = rng.gaussian_vector(p.n());
  } while (v.norm() == 0.0);
  return v / (p.A().transpose() * v).norm();
}

Lemma9Init lemma9_init(const ProblemInstance& p, const RngSpec& rng) {
  return lemma9_construct(p, draw_lemma9_seed(p, rng));
}

Theorem12Witness check_theorem12(const LayerStack& s, const ProblemInstance& p) {
  if (s.depth() != 2) fail(ErrorCode::InvalidArgument, "check_theorem12 needs depth 2");
  check_dims(s.weights, s.x, p);
  const double xx = s.x.squaredNorm();
  if (xx == 0.0) fail(ErrorCode::ZeroX, "x = 0 is a saddle of the depth-2 network");
  const Matrix& W1 = s.weights[0];
  const Matrix& W2 = s.weights[1];
  const Vector c = W2 * s.x;
  const Vector y = W1 * c;
  const Matrix AW1 = p.A() * W1;

  Theorem12Witness w;
  w.v = p.at_pinv_apply(y) / (xx * xx);
  w.u = (p.A() * y) / (xx * AW1.squaredNorm());
  const Vector atu = p.A().transpose() * w.u;
  w.residual_W1 = (W1 - (p.A().transpose() * w.v) * c.transpose()).norm();
  const Vector w1t_atu = W1.transpose() * atu;
  w.residual_W2 = (W2 - w1t_atu * s.x.transpose()).norm();
  w.residual_x = (s.x - W2.transpose() * w1t_atu).norm();
  return w;
}

CompactRun run_algorithm4(const ProblemInstance& p, const GdConfig& cfg, const RngSpec& rng) {
  return run_algorithm4(p, cfg, draw_lemma9_seed(p, rng));
}

CompactRun run_algorithm4(const ProblemInstance& p, const GdConfig& cfg, const Vector& v0) {
  if (v0.size() != p.n()) fail(ErrorCode::DimensionMismatch, "run_algorithm4: v0 has wrong length");
  if (v0.squaredNorm() == 0.0) fail(ErrorCode::InvalidArgument, "run_algorithm4 needs v0 != 0");
  const double alpha = cfg.resolve_alpha(p);
  CompactRun out;
  out.trace.amplification_power = 2;
  CompactState& st = out.state;
  st.v = v0;
  st.rho = 1.0;
  st.z = p.A().transpose() * st.v;
  RunMonitor monitor(p, cfg, out.trace);
  Vector y(p.n()), e(p.n()), y_hat(p.d());
  for (int k = 0;; ++k) {
    y.noalias() = p.A() * st.z;
    const double rho2 = st.rho * st.rho;
    const double rho4 = rho2 * rho2;
    e = alpha * (rho4 * y - p.b());
    st.gamma = rho2 * y.dot(e);
    y_hat = rho4 * st.z;
    if (monitor.record(k, y_hat, e.norm() / alpha, st.gamma, st.rho)) break;
    const double shrink = 1.0 - st.gamma;
    if (std::abs(shrink) < kGammaGuard)
      fail(ErrorCode::GammaSingular, "|1 - gamma| < 1e-14 at iteration " + std::to_string(k));
    st.v -= e;
    st.v /= shrink * shrink;
    st.rho *= shrink;
    st.z.noalias() = p.A().transpose() * st.v;
  }
  const double rho2 = st.rho * st.rho;
  out.theta_hat = rho2 * rho2 * st.z;
  return out;
}

BioptReport check_corollary14(const LayerStack& s, const ProblemInstance& p, double tol) {
  if (s.depth() != 2) fail(ErrorCode::InvalidArgument, "check_corollary14 needs depth 2");
  check_dims(s.weights, s.x, p);
  const double xx = s.x.squaredNorm();
  if (xx == 0.0) fail(ErrorCode::ZeroX, "x = 0");
  const Matrix& W1 = s.weights[0];
  const Matrix& W2 = s.weights[1];
  const Vector c = W2 * s.x;
  const Vector y = W1 * c;
  const double miss = (p.A() * y - p.b()).norm();
  if (miss > tol * p.b_scale()) fail(ErrorCode::NotInterpolant, "||A W1 W2 x - b|| = " + std::to_string(miss));
  const double cc = c.squaredNorm();
  if (cc == 0.0) fail(ErrorCode::ZeroX, "W2 x = 0");

  const Matrix AW1 = p.A() * W1;
  BioptReport report;
  auto add = [&](std::string name, double residual) {
    report.statements.push_back({std::move(name), residual, residual <= tol});
  };
  add("product_is_min_norm", (y - p.theta_star()).norm());
  add("x_is_min_norm", (s.x - pinv_solve(AW1 * W2, p.b())).norm());
  // Rank-one closed forms: min-Frobenius Z of M Z w = b is M^+ b w^T / ||w||^2.
  add("W1_is_min_frobenius", (W1 - p.theta_star() * (c.transpose() / cc)).norm());
  add("W2_is_min_frobenius", (W2 - pinv_solve(AW1, p.b()) * (s.x.transpose() / xx)).norm());
  return report;
}

StabilityDecomposition stability_decompose(const Matrix& W1, const ProblemInstance& p) {
  if (W1.rows() != p.d()) fail(ErrorCode::DimensionMismatch, "W1 must have d rows");
  StabilityDecomposition out;
  out.P = p.at_pinv_apply(W1);
  out.C = W1 - p.A().transpose() * out.P;
  return out;
}

double stability_bound(const LayerStack& s, const Matrix& C) {
  if (s.depth() < 1) fail(ErrorCode::InvalidArgument, "stability_bound needs depth >= 1");
  double bound = s.x.norm() * spectral_norm(C);
  for (int j = 1; j < s.depth(); ++j) bound *= spectral_norm(s.weights[j]);
  return bound;
}

LayerStack stability_init(const ProblemInstance& p, int h, double c_norm, const RngSpec& spec) {
  if (h < 1) fail(ErrorCode::InvalidArgument, "stability_init needs depth >= 1");
  if (p.d() == p.n()) fail(ErrorCode::InvalidArgument, "stability_init needs a nontrivial kernel (d > n)");
  if (!(c_norm > 0.0)) fail(ErrorCode::InvalidArgument, "c_norm must be positive");
  Rng rng(spec);
  const Index d = p.d();
  Matrix C = rng.gaussian_matrix(d, d);
  for (Index j = 0; j < d; ++j) C.col(j) = p.kernel_component(C.col(j));
  C *= c_norm / spectral_norm(C);
  LayerStack s;
  Matrix row_part = p.A().transpose() * rng.gaussian_matrix(p.n(), d);
  row_part /= spectral_norm(row_part);
  s.weights.push_back(row_part + C);
  for (int i = 1; i < h; ++i) s.weights.push_back(Matrix::Identity(d, d));
  s.x = rng.unit_sphere(d);
  return s;
}

LayerStack baseline_init(Index d, int h, BaselineKind kind, const RngSpec& spec) {
  if (d < 1 || h < 1) fail(ErrorCode::InvalidArgument, "baseline_init needs d >= 1 and h >= 1");
  Rng rng(spec);
  LayerStack s;
  s.weights.reserve(h);
  const double dd = static_cast<double>(d);
  for (int i = 0; i < h; ++i) {
    Matrix W(d, d);
    switch (kind) {
      case BaselineKind::Xavier: {
        const double bound = 1.0 / std::sqrt(dd);
        for (Index c = 0; c < d; ++c)
          for (Index r = 0; r < d; ++r) W(r, c) = rng.uniform(-bound, bound);
        break;
      }
      case BaselineKind::He:
        W = std::sqrt(2.0 / dd) * rng.gaussian_matrix(d, d);
        break;
      case BaselineKind::Identity:
        W.setIdentity();
        break;
    }
    s.weights.push_back(std::move(W));
  }
  s.x = rng.unit_sphere(d);
  return s;
}

}  // namespace rowspace
