#include "rowspace/hidden_one.hpp"

#include <cmath>
#include <string>

#include "rowspace/errors.hpp"

namespace rowspace {

namespace {

// Gradient norm, relative to ||A|| * ||Ay - b||, below which a point counts as a saddle.
constexpr double kSaddleTol = 1e-10;

void check_dims(const HiddenPair& s, const ProblemInstance& p) {
  if (s.W.rows() != p.d() || s.W.cols() != p.d() || s.x.size() != p.d())
    fail(ErrorCode::DimensionMismatch, "hidden pair must be d x d and d");
}

}  // namespace

HiddenPair gd_step_hidden(const HiddenPair& s, const ProblemInstance& p, double alpha) {
  check_dims(s, p);
  const Vector y = s.W * s.x;
  const Vector r = p.A() * y - p.b();
  const Vector g = p.A().transpose() * r;
  HiddenPair out;
  out.W = s.W - alpha * (g * s.x.transpose());
  out.x = s.x - alpha * (s.W.transpose() * g);
  return out;
}

BioptSeed draw_biopt_seed(const ProblemInstance& p, const RngSpec& spec) {
  Rng rng(spec);
  BioptSeed seed;
  do {
    seed.v0 = rng.gaussian_vector(p.n());
  } while (seed.v0.norm() == 0.0);
  seed.v0 *= p.b_scale() / (p.A() * (p.A().transpose() * seed.v0)).norm();
  seed.x0 = rng.unit_sphere(p.d());
  return seed;
}

HiddenPair biopt_from(const ProblemInstance& p, const Vector& v0, const Vector& x0) {
  if (v0.size() != p.n() || x0.size() != p.d()) fail(ErrorCode::DimensionMismatch, "biopt_from: bad seed sizes");
  return HiddenPair{(p.A().transpose() * v0) * x0.transpose(), x0};
}

HiddenPair biopt_init(const ProblemInstance& p, const RngSpec& rng) {
  const BioptSeed seed = draw_biopt_seed(p, rng);
  return biopt_from(p, seed.v0, seed.x0);
}

HiddenRun run_hidden(const HiddenPair& s0, const ProblemInstance& p, const GdConfig& cfg) {
  check_dims(s0, p);
  const double alpha = cfg.resolve_alpha(p);
  HiddenRun out{s0, {}};
  RunMonitor monitor(p, cfg, out.trace);
  for (int k = 0;; ++k) {
    HiddenPair& s = out.state;
    const Vector y = s.W * s.x;
    if (monitor.record(k, y)) break;
    const Vector r = p.A() * y - p.b();
    const Vector g = p.A().transpose() * r;
    const Vector grad_x = s.W.transpose() * g;
    const double grad_norm = std::sqrt(g.squaredNorm() * s.x.squaredNorm() + grad_x.squaredNorm());
    if (grad_norm <= kSaddleTol * p.spectral_norm() * r.norm()) {
      monitor.stop(Termination::SaddleStop);
      break;
    }
    s.W.noalias() -= alpha * (g * s.x.transpose());
    s.x -= alpha * grad_x;
  }
  return out;
}

Theorem6Check check_theorem6(const HiddenPair& s, const ProblemInstance& p) {
  check_dims(s, p);
  const double xx = s.x.squaredNorm();
  if (xx == 0.0) fail(ErrorCode::ZeroX, "x = 0; the rank-one structure is undefined");
  Theorem6Check out;
  out.v_hat = p.at_pinv_apply(s.W * s.x) / xx;
  out.residual = (s.W - (p.A().transpose() * out.v_hat) * s.x.transpose()).norm();
  return out;
}

bool BioptReport::all_pass() const {
  for (const auto& st : statements)
    if (!st.pass) return false;
  return !statements.empty();
}

BioptReport check_bioptimality(const HiddenPair& s, const ProblemInstance& p, double tol) {
  check_dims(s, p);
  const double xx = s.x.squaredNorm();
  if (xx == 0.0) fail(ErrorCode::ZeroX, "x = 0");
  const Vector y = s.W * s.x;
  const double miss = (p.A() * y - p.b()).norm();
  if (miss > tol * p.b_scale())
    fail(ErrorCode::NotInterpolant, "||A W x - b|| = " + std::to_string(miss));

  const Matrix AW = p.A() * s.W;
  BioptReport report;
  auto add = [&](std::string name, double residual) {
    report.statements.push_back({std::move(name), residual, residual <= tol});
  };
  add("product_is_min_norm", (y - p.theta_star()).norm());
  add("x_is_min_norm", (s.x - pinv_solve(AW, p.b())).norm());
  // Min-Frobenius Z with A Z x = b is theta* x^T / ||x||^2; the d^2-column
  // Kronecker system is never formed.
  add("W_is_min_frobenius", (s.W - p.theta_star() * (s.x.transpose() / xx)).norm());
  return report;
}

Algorithm2Run run_algorithm2(const ProblemInstance& p, const GdConfig& cfg, const RngSpec& rng) {
  const BioptSeed seed = draw_biopt_seed(p, rng);
  return run_algorithm2(p, cfg, seed.v0, seed.x0);
}

Algorithm2Run run_algorithm2(const ProblemInstance& p, const GdConfig& cfg, const Vector& v0, const Vector& x0) {
  if (v0.size() != p.n() || x0.size() != p.d()) fail(ErrorCode::DimensionMismatch, "run_algorithm2: bad seed sizes");
  if (x0.squaredNorm() == 0.0 || v0.squaredNorm() == 0.0)
    fail(ErrorCode::InvalidArgument, "run_algorithm2 needs non-zero x0 and v0");
  const double alpha = cfg.resolve_alpha(p);
  Algorithm2Run out;
  out.reduced = ReducedState{x0, v0};
  RunMonitor monitor(p, cfg, out.trace);
  Vector& x = out.reduced.x;
  Vector& v = out.reduced.v;
  for (int k = 0;; ++k) {
    const double xx = x.squaredNorm();
    const Vector z = p.A().transpose() * v;
    const Vector q = p.A() * z;       // A A^T v
    const Vector e = xx * q - p.b();  // A W x - b
    if (monitor.record(k, xx * z)) break;
    const Vector x_next = x - (alpha * q.dot(e)) * x;
    const double nn = x_next.squaredNorm();
    if (nn == 0.0) {
      monitor.stop(Termination::SaddleStop);
      break;
    }
    v = (v - alpha * e) * (x.dot(x_next) / nn);
    x = x_next;
  }
  out.state = HiddenPair{(p.A().transpose() * v) * x.transpose(), x};
  return out;
}

CompactRun run_algorithm3(const ProblemInstance& p, const GdConfig& cfg, const RngSpec& rng) {
  return run_algorithm3(p, cfg, draw_biopt_seed(p, rng).v0);
}

CompactRun run_algorithm3(const ProblemInstance& p, const GdConfig& cfg, const Vector& v0) {
  if (v0.size() != p.n()) fail(ErrorCode::DimensionMismatch, "run_algorithm3: v0 has wrong length");
  if (v0.squaredNorm() == 0.0) fail(ErrorCode::InvalidArgument, "run_algorithm3 needs v0 != 0");
  const double alpha = cfg.resolve_alpha(p);
  CompactRun out;
  out.trace.amplification_power = 1;
  CompactState& st = out.state;
  st.v = v0;
  st.rho = 1.0;
  st.z = p.A().transpose() * st.v;
  RunMonitor monitor(p, cfg, out.trace);
  Vector y(p.n()), r(p.n()), y_hat(p.d());
  for (int k = 0;; ++k) {
    y.noalias() = p.A() * st.z;
    const double rho2 = st.rho * st.rho;
    r = alpha * (rho2 * y - p.b());
    st.gamma = y.dot(r);
    y_hat = rho2 * st.z;
    if (monitor.record(k, y_hat, r.norm() / alpha, st.gamma, st.rho)) break;
    const double shrink = 1.0 - st.gamma;
    if (std::abs(shrink) < kGammaGuard)
      fail(ErrorCode::GammaSingular, "|1 - gamma| < 1e-14 at iteration " + std::to_string(k));
    st.v -= r;
    st.v /= shrink;
    st.rho *= shrink;
    st.z.noalias() = p.A().transpose() * st.v;
  }
  out.theta_hat = st.rho * st.rho * st.z;
  return out;
}

}  // namespace rowspace
