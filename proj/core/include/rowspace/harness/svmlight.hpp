#pragma once

#include <filesystem>
#include <istream>

#include "rowspace/linalg.hpp"

namespace rowspace::harness {

/// Reads `<label> <index>:<value> ...` lines (1-based indices, blank lines and
/// '#' comments skipped). Labels become b. All-zero columns are dropped and
/// both A and b are divided by `scale`.
///
/// Throws ParseError (with the line number), EmptyFile, or RankDeficient.
ProblemInstance parse_svmlight(std::istream& in, double scale = 1.0);
ProblemInstance load_svmlight(const std::filesystem::path& path, double scale = 1.0);

}  // namespace rowspace::harness
