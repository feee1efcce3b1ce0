#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rowspace/harness/csv.hpp"
#include "rowspace/linalg.hpp"
#include "rowspace/trace.hpp"

namespace rowspace::harness {

struct PathProjection {
  Matrix basis;  // 2 x d, orthonormal rows
  std::vector<std::vector<Eigen::Vector2d>> points;  // one path per input trace
};

/// Draws one random 2 x d basis from `rng` and maps every snapshot of every
/// trace onto it. Throws DimensionMismatch when a snapshot is not length d.
PathProjection project_paths(const std::vector<IterateTrace>& traces, Index d, const RngSpec& rng);

/// Columns k,p1,p2 for path `index` of the projection.
void write_path(const std::filesystem::path& path, const PathProjection& proj, std::size_t index,
                const IterateTrace& trace, const Metadata& meta);

}  // namespace rowspace::harness
