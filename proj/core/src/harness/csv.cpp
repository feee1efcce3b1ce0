#include "rowspace/harness/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rowspace/errors.hpp"

namespace rowspace::harness {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

void write_meta(std::ostream& out, const Metadata& meta) {
  for (const auto& [key, value] : meta) out << "# " << key << '=' << value << '\n';
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, int line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad number '" + text + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_trace(std::ostream& out, const IterateTrace& trace, const Metadata& meta) {
  write_meta(out, meta);
  out << "# terminated_by=" << to_string(trace.terminated_by) << '\n';
  out << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.k << ',' << format_double(r.residual) << ',' << format_double(r.dist_theta_star) << ',';
    if (r.gamma) out << format_double(*r.gamma);
    out << ',';
    if (r.rho) out << format_double(*r.rho);
    out << '\n';
  }
}

void write_trace(const std::filesystem::path& path, const IterateTrace& trace, const Metadata& meta) {
  auto out = open_out(path);
  write_trace(out, trace, meta);
}

std::vector<TraceRecord> read_trace(std::istream& in) {
  std::vector<TraceRecord> records;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kTraceHeader) fail(ErrorCode::ParseError, "unexpected trace header '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto f = split_fields(line);
    if (f.size() != 5) fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 5 fields");
    TraceRecord r;
    int k = 0;
    const auto [ptr, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), k);
    if (ec != std::errc() || ptr != f[0].data() + f[0].size())
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad iteration '" + f[0] + "'");
    r.k = k;
    r.residual = parse_double(f[1], line_no);
    r.dist_theta_star = parse_double(f[2], line_no);
    if (!f[3].empty()) r.gamma = parse_double(f[3], line_no);
    if (!f[4].empty()) r.rho = parse_double(f[4], line_no);
    records.push_back(r);
  }
  if (!header_seen) fail(ErrorCode::ParseError, "missing trace header");
  return records;
}

std::vector<TraceRecord> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  return read_trace(in);
}

SummaryRow summarize(const std::string& method, const IterateTrace& trace) {
  SummaryRow row;
  row.method = method;
  row.terminated_by = trace.terminated_by;
  if (!trace.records.empty()) {
    const auto& last = trace.last();
    row.iterations = last.k;
    row.residual = last.residual;
    row.loss = 0.5 * last.residual * last.residual;
    row.dist_theta_star = last.dist_theta_star;
  }
  return row;
}

void write_summary(const std::filesystem::path& path, const std::vector<SummaryRow>& rows, const Metadata& meta) {
  auto out = open_out(path);
  write_meta(out, meta);
  out << "method,iterations,terminated_by,residual,loss,dist_theta_star\n";
  for (const auto& r : rows)
    out << r.method << ',' << r.iterations << ',' << to_string(r.terminated_by) << ',' << format_double(r.residual)
        << ',' << format_double(r.loss) << ',' << format_double(r.dist_theta_star) << '\n';
}

void write_histogram(const std::filesystem::path& path, const Histogram& hist, const Metadata& meta) {
  auto out = open_out(path);
  write_meta(out, meta);
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i)
    out << format_double(hist.bin_edges[i]) << ',' << format_double(hist.bin_edges[i + 1]) << ',' << hist.counts[i]
        << '\n';
}

void write_percentiles(const std::filesystem::path& path, const std::map<int, TrialStats>& stats, double within_tol,
                       const Metadata& meta) {
  auto out = open_out(path);
  write_meta(out, meta);
  out << "# within_tol=" << format_double(within_tol) << '\n';
  out << "h,p25,p50,p75,variance,within_tol,diverged,trials\n";
  for (const auto& [h, st] : stats)
    out << h << ',' << format_double(st.percentiles.at(25)) << ',' << format_double(st.percentiles.at(50)) << ','
        << format_double(st.percentiles.at(75)) << ',' << format_double(st.variance) << ','
        << format_double(st.fraction_within(within_tol)) << ',' << st.diverged << ',' << st.distances.size() << '\n';
}

}  // namespace rowspace::harness
