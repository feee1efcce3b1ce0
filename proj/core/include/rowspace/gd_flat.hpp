#pragma once

#include "rowspace/linalg.hpp"
#include "rowspace/trace.hpp"

namespace rowspace {

/// y - alpha * A^T (A y - b).
Vector gd_step(const Vector& y, const ProblemInstance& p, double alpha);

struct GdRun {
  Vector y;
  IterateTrace trace;
};

/// Plain fixed-step gradient descent on 0.5 * ||A y - b||^2 starting at y0.
GdRun run_gd(const Vector& y0, const ProblemInstance& p, const GdConfig& cfg);

/// Limit of run_gd from y0: V2 V2^T y0 + theta*. Throws StepTooLarge unless
/// alpha * ||A||^2 < 2.
Vector predict_limit(const Vector& y0, const ProblemInstance& p, double alpha);

/// Initial guess whose gradient-descent limit is `target`.
///
/// Runs the inner iteration z <- z - a V2 V2^T (V2 V2^T z - (target - theta*))
/// from z = 0, where a = min(alpha, 1) keeps the projector's quadratic in its
/// stable range. Throws NotASolution when A target != b, MaxIters when the
/// inner loop does not settle within cfg.max_iters.
Vector controlled_init(const ProblemInstance& p, const Vector& target, const GdConfig& cfg);

/// controlled_init followed by run_gd from the returned guess.
GdRun run_controlled(const ProblemInstance& p, const Vector& target, const GdConfig& cfg);

}  // namespace rowspace
