#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "rowspace/linalg.hpp"

namespace rowspace {

/// Fixed-step gradient-descent settings shared by every iteration in the library.
struct GdConfig {
  /// Step size; unset means 1 / ||A||^2.
  std::optional<double> alpha;
  int max_iters = 100000;
  /// Stop once ||A y - b|| <= tol_residual * ||b||.
  double tol_residual = 1e-12;
  /// Stop once ||y_{k+1} - y_k|| <= tol_step.
  double tol_step = 0.0;
  /// Keep the effective predictor every snapshot_every iterations (0 disables).
  int snapshot_every = 0;
  /// Keep a trace record every record_every iterations; the first and the last
  /// iterate are always kept. Stopping rules still see every iterate.
  int record_every = 1;

  void validate() const;
  double resolve_alpha(const ProblemInstance& p) const;
};

enum class Termination { Residual, Step, MaxIters, Diverged, SaddleStop };

std::string_view to_string(Termination t);

struct TraceRecord {
  int k = 0;
  double residual = 0.0;
  double dist_theta_star = 0.0;
  std::optional<double> gamma;
  std::optional<double> rho;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct Snapshot {
  int k = 0;
  Vector y;
};

struct IterateTrace {
  std::vector<TraceRecord> records;
  std::vector<Snapshot> snapshots;
  Termination terminated_by = Termination::MaxIters;
  /// Exponent p of the amplification factor (1/(1-gamma))^p; 0 when the
  /// method carries no gamma.
  int amplification_power = 0;

  const TraceRecord& last() const { return records.back(); }
  int iterations() const { return records.empty() ? 0 : records.back().k; }
};

/// Records residual and distance to theta* for each iterate and decides when a
/// run stops. Non-finite iterates are never recorded; they mark the trace
/// Diverged.
class RunMonitor {
 public:
  /// Residual above this multiple of ||b|| counts as divergence.
  static constexpr double kDivergenceFactor = 1e12;

  RunMonitor(const ProblemInstance& p, const GdConfig& cfg, IterateTrace& trace);

  /// Returns true when the run must stop; trace.terminated_by is then set.
  bool record(int k, const Vector& y, std::optional<double> gamma = {}, std::optional<double> rho = {});
  /// Same, with ||A y - b|| supplied by a caller that already has it.
  bool record(int k, const Vector& y, double residual, std::optional<double> gamma = {},
              std::optional<double> rho = {});

  /// Marks the trace as stopped for a reason detected by the caller.
  void stop(Termination reason) { trace_.terminated_by = reason; }

  double residual_of(const Vector& y) const;

 private:
  const ProblemInstance& p_;
  const GdConfig& cfg_;
  IterateTrace& trace_;
  Vector prev_;
  mutable Vector scratch_;
  bool has_prev_ = false;
};

struct ZigzagReport {
  std::optional<int> onset;
  bool oscillating = false;
};

/// Finds the first iteration where the amplification factor exceeds 1 and then
/// alternates below/above 1 over at least three consecutive iterations.
/// Throws NoGammaData when the trace carries no gamma values.
ZigzagReport detect_zigzag(const IterateTrace& trace);

}  // namespace rowspace
