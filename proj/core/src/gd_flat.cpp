#include "rowspace/gd_flat.hpp"

#include <algorithm>
#include <string>

#include "rowspace/errors.hpp"

namespace rowspace {

Vector gd_step(const Vector& y, const ProblemInstance& p, double alpha) {
  if (y.size() != p.d()) fail(ErrorCode::DimensionMismatch, "gd_step: y has wrong length");
  const Vector r = p.A() * y - p.b();
  return y - alpha * (p.A().transpose() * r);
}

GdRun run_gd(const Vector& y0, const ProblemInstance& p, const GdConfig& cfg) {
  if (y0.size() != p.d()) fail(ErrorCode::DimensionMismatch, "run_gd: y0 has wrong length");
  const double alpha = cfg.resolve_alpha(p);
  GdRun out{y0, {}};
  RunMonitor monitor(p, cfg, out.trace);
  Vector r(p.n());
  for (int k = 0;; ++k) {
    r.noalias() = p.A() * out.y;
    r -= p.b();
    if (monitor.record(k, out.y, r.norm())) break;
    out.y.noalias() -= alpha * (p.A().transpose() * r);
  }
  return out;
}

Vector predict_limit(const Vector& y0, const ProblemInstance& p, double alpha) {
  if (y0.size() != p.d()) fail(ErrorCode::DimensionMismatch, "predict_limit: y0 has wrong length");
  const double s = p.spectral_norm();
  if (!(alpha > 0.0) || alpha * s * s >= 2.0)
    fail(ErrorCode::StepTooLarge, "need ||A||^2 < 2/alpha (alpha*||A||^2 = " + std::to_string(alpha * s * s) + ")");
  return p.kernel_component(y0) + p.theta_star();
}

Vector controlled_init(const ProblemInstance& p, const Vector& target, const GdConfig& cfg) {
  cfg.validate();
  if (target.size() != p.d()) fail(ErrorCode::DimensionMismatch, "controlled_init: target has wrong length");
  const double miss = (p.A() * target - p.b()).norm();
  if (miss > 1e-8 * p.b_scale())
    fail(ErrorCode::NotASolution, "target does not solve A y = b (||A target - b|| = " + std::to_string(miss) + ")");

  const Vector shift = target - p.theta_star();
  const double step = std::min(cfg.resolve_alpha(p), 1.0);
  const double tol = cfg.tol_residual * std::max(shift.norm(), target.norm());

  Vector z = Vector::Zero(p.d());
  for (int k = 0; k < cfg.max_iters; ++k) {
    const Vector mismatch = p.kernel_component(z) - shift;
    if (mismatch.norm() <= tol) return z;
    const Vector delta = step * p.kernel_component(mismatch);
    z -= delta;
    if (delta.norm() <= cfg.tol_step) return z;
  }
  if ((p.kernel_component(z) - shift).norm() <= tol) return z;
  fail(ErrorCode::MaxIters, "controlled_init inner loop did not converge in " + std::to_string(cfg.max_iters) +
                                " iterations");
}

GdRun run_controlled(const ProblemInstance& p, const Vector& target, const GdConfig& cfg) {
  return run_gd(controlled_init(p, target, cfg), p, cfg);
}

}  // namespace rowspace
