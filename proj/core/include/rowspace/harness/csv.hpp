#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rowspace/riemannian.hpp"
#include "rowspace/trace.hpp"

namespace rowspace::harness {

/// Written as `# key=value` lines at the top of every file, in order.
using Metadata = std::vector<std::pair<std::string, std::string>>;

inline constexpr const char* kTraceHeader = "iter,residual,dist_theta_star,gamma,rho";

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

void write_trace(std::ostream& out, const IterateTrace& trace, const Metadata& meta);
void write_trace(const std::filesystem::path& path, const IterateTrace& trace, const Metadata& meta);

/// Parses the records back; comment lines are skipped. Throws ParseError.
std::vector<TraceRecord> read_trace(std::istream& in);
std::vector<TraceRecord> read_trace(const std::filesystem::path& path);

struct SummaryRow {
  std::string method;
  int iterations = 0;
  Termination terminated_by = Termination::MaxIters;
  double residual = 0.0;
  double loss = 0.0;  // 0.5 * residual^2
  double dist_theta_star = 0.0;
};

SummaryRow summarize(const std::string& method, const IterateTrace& trace);
void write_summary(const std::filesystem::path& path, const std::vector<SummaryRow>& rows, const Metadata& meta);

void write_histogram(const std::filesystem::path& path, const Histogram& hist, const Metadata& meta);
/// One row per depth: h, p25, p50, p75, variance, within_tol, diverged, trials.
void write_percentiles(const std::filesystem::path& path, const std::map<int, TrialStats>& stats, double within_tol,
                       const Metadata& meta);

}  // namespace rowspace::harness
