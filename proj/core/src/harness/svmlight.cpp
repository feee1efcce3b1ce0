#include "rowspace/harness/svmlight.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "rowspace/errors.hpp"

namespace rowspace::harness {

namespace {

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

[[noreturn]] void parse_error(int line, const std::string& what) {
  fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

ProblemInstance parse_svmlight(std::istream& in, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) fail(ErrorCode::InvalidArgument, "scale must be positive and finite");

  std::vector<Eigen::Triplet<double, Index>> entries;
  std::vector<double> labels;
  Index width = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string token;
    if (!(tokens >> token)) continue;

    double label = 0.0;
    if (!parse_number(token, label) || !std::isfinite(label)) parse_error(line_no, "bad label '" + token + "'");
    const auto row = static_cast<Index>(labels.size());
    labels.push_back(label);

    long long last_index = 0;
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) parse_error(line_no, "expected index:value, got '" + token + "'");
      long long index = 0;
      double value = 0.0;
      const std::string_view view(token);
      if (!parse_number(view.substr(0, colon), index) || index < 1)
        parse_error(line_no, "bad feature index in '" + token + "'");
      if (!parse_number(view.substr(colon + 1), value) || !std::isfinite(value))
        parse_error(line_no, "bad feature value in '" + token + "'");
      if (index <= last_index) parse_error(line_no, "feature indices must be strictly increasing");
      last_index = index;
      entries.emplace_back(row, static_cast<Index>(index - 1), value);
      width = std::max(width, static_cast<Index>(index));
    }
  }
  if (labels.empty()) fail(ErrorCode::EmptyFile, "no data lines");

  const auto n = static_cast<Index>(labels.size());
  Eigen::SparseMatrix<double, Eigen::ColMajor, Index> sparse(n, width);
  sparse.setFromTriplets(entries.begin(), entries.end());
  sparse.makeCompressed();

  std::vector<Index> kept;
  for (Index c = 0; c < width; ++c) {
    bool nonzero = false;
    for (decltype(sparse)::InnerIterator it(sparse, c); it; ++it) nonzero = nonzero || it.value() != 0.0;
    if (nonzero) kept.push_back(c);
  }
  const auto d = static_cast<Index>(kept.size());
  if (d < n) fail(ErrorCode::RankDeficient, "only " + std::to_string(d) + " nonzero columns for " + std::to_string(n) + " rows");

  Matrix A = Matrix::Zero(n, d);
  for (Index j = 0; j < d; ++j)
    for (decltype(sparse)::InnerIterator it(sparse, kept[j]); it; ++it) A(it.row(), j) = it.value() / scale;
  Vector b(n);
  for (Index i = 0; i < n; ++i) b(i) = labels[i] / scale;
  return ProblemInstance(std::move(A), std::move(b));
}

ProblemInstance load_svmlight(const std::filesystem::path& path, double scale) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  return parse_svmlight(in, scale);
}

}  // namespace rowspace::harness
