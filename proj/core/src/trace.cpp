#include "rowspace/trace.hpp"

#include <cmath>

#include "rowspace/errors.hpp"

namespace rowspace {

void GdConfig::validate() const {
  if (alpha && !(*alpha > 0.0 && std::isfinite(*alpha)))
    fail(ErrorCode::InvalidArgument, "alpha must be positive and finite");
  if (max_iters < 1) fail(ErrorCode::InvalidArgument, "max_iters must be >= 1");
  if (!(tol_residual >= 0.0) || !(tol_step >= 0.0))
    fail(ErrorCode::InvalidArgument, "tolerances must be non-negative");
  if (snapshot_every < 0) fail(ErrorCode::InvalidArgument, "snapshot_every must be >= 0");
  if (record_every < 1) fail(ErrorCode::InvalidArgument, "record_every must be >= 1");
}

double GdConfig::resolve_alpha(const ProblemInstance& p) const {
  if (alpha) return *alpha;
  const double s = p.spectral_norm();
  return 1.0 / (s * s);
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Residual: return "Residual";
    case Termination::Step: return "Step";
    case Termination::MaxIters: return "MaxIters";
    case Termination::Diverged: return "Diverged";
    case Termination::SaddleStop: return "SaddleStop";
  }
  return "Unknown";
}

RunMonitor::RunMonitor(const ProblemInstance& p, const GdConfig& cfg, IterateTrace& trace)
    : p_(p), cfg_(cfg), trace_(trace) {
  cfg_.validate();
}

double RunMonitor::residual_of(const Vector& y) const {
  scratch_.noalias() = p_.A() * y;
  scratch_ -= p_.b();
  return scratch_.norm();
}

bool RunMonitor::record(int k, const Vector& y, std::optional<double> gamma, std::optional<double> rho) {
  return record(k, y, residual_of(y), gamma, rho);
}

bool RunMonitor::record(int k, const Vector& y, double residual, std::optional<double> gamma,
                        std::optional<double> rho) {
  const bool finite = std::isfinite(residual) && y.allFinite() && (!gamma || std::isfinite(*gamma)) &&
                      (!rho || std::isfinite(*rho));
  if (!finite) {
    trace_.terminated_by = Termination::Diverged;
    return true;
  }

  std::optional<Termination> stop;
  const double scale = p_.b_scale();
  if (residual > kDivergenceFactor * scale) {
    stop = Termination::Diverged;
  } else if (residual <= cfg_.tol_residual * scale) {
    stop = Termination::Residual;
  } else if (has_prev_ && (y - prev_).norm() <= cfg_.tol_step) {
    stop = Termination::Step;
  } else if (k >= cfg_.max_iters) {
    stop = Termination::MaxIters;
  }

  if (stop || k % cfg_.record_every == 0)
    trace_.records.push_back(TraceRecord{k, residual, (y - p_.theta_star()).norm(), gamma, rho});
  const bool snap_due = cfg_.snapshot_every > 0 && (k % cfg_.snapshot_every == 0 || stop.has_value());
  if (snap_due && (trace_.snapshots.empty() || trace_.snapshots.back().k != k))
    trace_.snapshots.push_back(Snapshot{k, y});

  if (stop) {
    trace_.terminated_by = *stop;
    return true;
  }
  if (cfg_.tol_step > 0.0) {
    prev_ = y;
    has_prev_ = true;
  }
  return false;
}

ZigzagReport detect_zigzag(const IterateTrace& trace) {
  if (trace.amplification_power <= 0) fail(ErrorCode::NoGammaData, "trace carries no gamma values");
  std::vector<double> factor;
  std::vector<int> ks;
  for (const auto& r : trace.records) {
    if (!r.gamma) continue;
    factor.push_back(std::pow(1.0 / (1.0 - *r.gamma), trace.amplification_power));
    ks.push_back(r.k);
  }
  if (factor.empty()) fail(ErrorCode::NoGammaData, "trace carries no gamma values");

  ZigzagReport out;
  for (std::size_t i = 0; i + 2 < factor.size(); ++i) {
    if (factor[i] > 1.0 && factor[i + 1] < 1.0 && factor[i + 2] > 1.0) {
      out.onset = ks[i];
      out.oscillating = true;
      break;
    }
  }
  return out;
}

}  // namespace rowspace
