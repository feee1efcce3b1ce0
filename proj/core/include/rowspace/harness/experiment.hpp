#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rowspace/harness/csv.hpp"
#include "rowspace/linalg.hpp"
#include "rowspace/trace.hpp"

namespace rowspace::harness {

struct SyntheticSpec {
  Index n = 20;
  Index d = 100;
  double cond = 10.0;
};

/// "n=..,d=..,cond=.." in any order; missing keys keep their defaults.
/// Throws InvalidArgument on unknown keys or malformed values.
SyntheticSpec parse_synthetic(std::string_view text);
/// "1,-2.5,3"
std::vector<double> parse_list(std::string_view text);
Vector parse_vector(std::string_view text);
/// Rows separated by ';', entries by ','.
Matrix parse_matrix(std::string_view text);

struct ExperimentConfig {
  std::string command = "solve";
  std::optional<SyntheticSpec> synthetic;
  std::optional<std::filesystem::path> data;
  double scale = 1.0;
  std::optional<Matrix> A;
  std::optional<Vector> b;
  std::string method;  // empty: the command's default
  std::string init;    // empty: the method's default
  std::optional<Vector> target;
  GdConfig gd;
  int depth = 0;  // 0: the command's default
  int trials = 2000;
  std::vector<int> h_list{1, 3, 6};
  double within_tol = 1e-3;
  std::uint64_t seed = 0;
  std::filesystem::path out = ".";
  unsigned threads = 0;

  /// Throws InvalidArgument for any out-of-range field or unknown name.
  void validate() const;
  Metadata metadata() const;
};

const std::vector<std::string>& known_commands();

/// Builds the problem from --data, then inline A/b, then --synthetic, then the
/// command's default system.
ProblemInstance make_problem(const ExperimentConfig& cfg);

struct RateProbe {
  double alpha = 0.0;
  bool stable = false;
  Termination terminated_by = Termination::MaxIters;
  int iterations = 0;
  double residual = 0.0;
};

struct RateSearch {
  std::optional<double> alpha;
  std::vector<RateProbe> probes;
};

/// 1e1, 1e0, ..., 1e-6.
std::vector<double> rate_grid();
/// Not diverged and the last residual no larger than the first.
bool is_stable(const IterateTrace& trace);
/// Tries rate_grid() from the largest rate down and returns the first stable
/// one. A run that throws GammaSingular or SingularStep counts as unstable.
RateSearch largest_stable_rate(const std::function<IterateTrace(double)>& run);

/// Runs the configured experiment, writes its CSV files under cfg.out and a
/// short report to `log`. Returns 0 when every requested run finished without
/// diverging, 3 otherwise. Configuration and data errors are thrown.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace rowspace::harness
