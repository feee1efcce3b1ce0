#include "rowspace/harness/paths.hpp"

#include <fstream>

#include "rowspace/errors.hpp"
#include "rowspace/rng.hpp"

namespace rowspace::harness {

PathProjection project_paths(const std::vector<IterateTrace>& traces, Index d, const RngSpec& spec) {
  if (d < 2) fail(ErrorCode::InvalidArgument, "path projection needs d >= 2");
  Rng rng(spec);
  PathProjection out;
  out.basis = random_orthonormal_columns(d, 2, rng).transpose();
  out.points.reserve(traces.size());
  for (const auto& trace : traces) {
    auto& path = out.points.emplace_back();
    path.reserve(trace.snapshots.size());
    for (const auto& snap : trace.snapshots) {
      if (snap.y.size() != d)
        fail(ErrorCode::DimensionMismatch, "snapshot of length " + std::to_string(snap.y.size()) + ", expected " +
                                               std::to_string(d));
      path.emplace_back(out.basis * snap.y);
    }
  }
  return out;
}

void write_path(const std::filesystem::path& path, const PathProjection& proj, std::size_t index,
                const IterateTrace& trace, const Metadata& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& [key, value] : meta) out << "# " << key << '=' << value << '\n';
  out << "k,p1,p2\n";
  const auto& pts = proj.points.at(index);
  for (std::size_t i = 0; i < pts.size(); ++i)
    out << trace.snapshots[i].k << ',' << format_double(pts[i].x()) << ',' << format_double(pts[i].y()) << '\n';
}

}  // namespace rowspace::harness
