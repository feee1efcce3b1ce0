#include "rowspace/harness/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <fstream>
#include <sstream>

#include "rowspace/deep_linear.hpp"
#include "rowspace/errors.hpp"
#include "rowspace/gd_flat.hpp"
#include "rowspace/harness/paths.hpp"
#include "rowspace/harness/svmlight.hpp"
#include "rowspace/hidden_one.hpp"
#include "rowspace/riemannian.hpp"
#include "rowspace/rng.hpp"

namespace rowspace::harness {

namespace {

// Stream ids under the master seed.
constexpr std::uint64_t kProblemStream = 0;
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kTrialStream = 2;
constexpr std::uint64_t kProjectionStream = 3;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  if (!t.empty() && t.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
    fail(ErrorCode::InvalidArgument, "not a finite number: '" + t + "'");
  return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string join(const Vector& v) {
  std::string s;
  for (Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v(i));
  return s;
}

const std::map<std::string, std::vector<std::string>>& inits_by_method() {
  static const std::map<std::string, std::vector<std::string>> m{
      {"gd", {"zero", "random"}},
      {"hidden", {"biopt", "random", "xavier", "he"}},
      {"compact1", {"biopt"}},
      {"deep", {"lemma9", "xavier", "he", "identity"}},
      {"compact2", {"lemma9"}},
      {"riemann", {"orthogonal"}},
      {"stability", {"constructed"}},
  };
  return m;
}

std::string method_of(const ExperimentConfig& cfg) {
  if (!cfg.method.empty()) return cfg.method;
  if (cfg.command == "solve" || cfg.command == "control" || cfg.command == "project") return "gd";
  if (cfg.command == "lrgrid") return "compact1";
  if (cfg.command == "trials") return "riemann";
  return cfg.command;
}

int depth_of(const ExperimentConfig& cfg, const std::string& method) {
  if (cfg.depth > 0) return cfg.depth;
  if (method == "deep" || method == "compact2" || method == "stability") return 2;
  return 1;
}

std::string init_of(const ExperimentConfig& cfg, const std::string& method) {
  if (!cfg.init.empty()) return cfg.init;
  if (method == "deep") return depth_of(cfg, method) == 2 ? "lemma9" : "xavier";
  return inits_by_method().at(method).front();
}

BaselineKind baseline_kind(const std::string& init) {
  if (init == "xavier") return BaselineKind::Xavier;
  if (init == "he") return BaselineKind::He;
  return BaselineKind::Identity;
}

struct MethodRun {
  std::string name;
  IterateTrace trace;
};

void report_zigzag(const IterateTrace& trace, std::ostream& log) {
  const ZigzagReport z = detect_zigzag(trace);
  log << "zigzag: " << (z.oscillating ? "onset at iteration " + std::to_string(*z.onset) : std::string("none")) << '\n';
}

void report_statements(const BioptReport& r, std::ostream& log) {
  for (const auto& s : r.statements)
    log << s.name << ": residual " << format_double(s.residual) << (s.pass ? " ok" : " FAIL") << '\n';
}

IterateTrace run_stability(const ProblemInstance& p, int h, const GdConfig& cfg, const RngSpec& rng,
                           std::ostream& log) {
  LayerStack s = stability_init(p, h, 1.0, rng);
  const Matrix C0 = stability_decompose(s.weights.front(), p).C;
  const double alpha = cfg.resolve_alpha(p);
  IterateTrace trace;
  RunMonitor monitor(p, cfg, trace);
  double drift = 0.0;
  for (int k = 0;; ++k) {
    drift = std::max(drift, (stability_decompose(s.weights.front(), p).C - C0).norm());
    if (monitor.record(k, s.product())) break;
    s = gd_step_deep(s, p, alpha);
  }
  const double bound = stability_bound(s, C0);
  const double dist = (s.product() - p.theta_star()).norm();
  log << "max ||C_k - C_0||_F: " << format_double(drift) << '\n'
      << "bound: " << format_double(bound) << "  distance: " << format_double(dist)
      << (dist <= bound ? " (within bound)" : " (EXCEEDS bound)") << '\n';
  return trace;
}

MethodRun run_method(const std::string& method, const ExperimentConfig& cfg, const ProblemInstance& p,
                     const GdConfig& gd, std::ostream& log) {
  const RngSpec rng{cfg.seed, kInitStream};
  const std::string init = init_of(cfg, method);
  const int h = depth_of(cfg, method);
  MethodRun out{method, {}};
  if (method == "gd") {
    const Vector y0 = init == "zero" ? Vector::Zero(p.d()) : Rng(rng).gaussian_vector(p.d());
    out.trace = run_gd(y0, p, gd).trace;
  } else if (method == "hidden") {
    HiddenPair s0;
    if (init == "biopt") {
      s0 = biopt_init(p, rng);
    } else if (init == "random") {
      Rng r(rng);
      s0.W = r.gaussian_matrix(p.d(), p.d()) / std::sqrt(static_cast<double>(p.d()));
      s0.x = r.unit_sphere(p.d());
    } else {
      LayerStack b = baseline_init(p.d(), 1, baseline_kind(init), rng);
      s0 = {std::move(b.weights.front()), std::move(b.x)};
    }
    HiddenRun run = run_hidden(s0, p, gd);
    out.trace = std::move(run.trace);
    if (init == "biopt" && out.trace.terminated_by == Termination::Residual)
      report_statements(check_bioptimality(run.state, p, 1e-6), log);
  } else if (method == "compact1") {
    out.trace = run_algorithm3(p, gd, rng).trace;
    report_zigzag(out.trace, log);
  } else if (method == "deep") {
    LayerStack s0 = init == "lemma9" ? lemma9_init(p, rng).stack : baseline_init(p.d(), h, baseline_kind(init), rng);
    DeepRun run = run_deep(s0, p, gd);
    out.trace = std::move(run.trace);
    if (init == "lemma9" && out.trace.terminated_by == Termination::Residual)
      report_statements(check_corollary14(run.state, p, 1e-6), log);
  } else if (method == "compact2") {
    out.trace = run_algorithm4(p, gd, rng).trace;
    report_zigzag(out.trace, log);
  } else if (method == "riemann") {
    RiemannianRun run = run_riemannian(p, h, gd, rng);
    out.trace = std::move(run.trace);
    log << "max orthogonality defect: " << format_double(run.max_orthogonality_defect) << '\n'
        << "max |prod ||W_i|| - 1|: " << format_double(run.max_norm_product_deviation) << '\n';
  } else if (method == "stability") {
    out.trace = run_stability(p, h, gd, rng, log);
  } else {
    fail(ErrorCode::InvalidArgument, "unknown method '" + method + "'");
  }
  return out;
}

void write_run(const ExperimentConfig& cfg, const MethodRun& run, const Metadata& meta, std::ostream& log) {
  write_trace(cfg.out / ("trace_" + run.name + ".csv"), run.trace, meta);
  const SummaryRow row = summarize(run.name, run.trace);
  log << run.name << ": " << to_string(row.terminated_by) << " after " << row.iterations << " iterations, residual "
      << format_double(row.residual) << ", distance to min-norm " << format_double(row.dist_theta_star) << '\n';
}

int status_of(const std::vector<MethodRun>& runs) {
  for (const auto& r : runs)
    if (r.trace.terminated_by == Termination::Diverged) return 3;
  return 0;
}

}  // namespace

SyntheticSpec parse_synthetic(std::string_view text) {
  SyntheticSpec spec;
  for (const auto& item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorCode::InvalidArgument, "expected key=value in --synthetic, got '" + item + "'");
    const std::string key = trim(std::string_view(item).substr(0, eq));
    const double value = to_double(std::string_view(item).substr(eq + 1));
    if (key == "n" || key == "d") {
      if (value < 1 || value != std::floor(value)) fail(ErrorCode::InvalidArgument, key + " must be a positive integer");
      (key == "n" ? spec.n : spec.d) = static_cast<Index>(value);
    } else if (key == "cond") {
      spec.cond = value;
    } else {
      fail(ErrorCode::InvalidArgument, "unknown --synthetic key '" + key + "'");
    }
  }
  return spec;
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(item));
  return out;
}

Vector parse_vector(std::string_view text) {
  const std::vector<double> v = parse_list(text);
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

Matrix parse_matrix(std::string_view text) {
  std::vector<std::vector<double>> rows;
  for (const auto& row : split(text, ';')) rows.push_back(parse_list(row));
  const auto cols = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != cols) fail(ErrorCode::DimensionMismatch, "matrix rows have different lengths");
  Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) M(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return M;
}

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> c{"solve",   "control", "hidden",  "compact1", "deep",   "compact2",
                                          "stability", "riemann", "trials", "project",  "lrgrid"};
  return c;
}

void ExperimentConfig::validate() const {
  const auto& cmds = known_commands();
  if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
    fail(ErrorCode::InvalidArgument, "unknown command '" + command + "'");
  gd.validate();
  if (!(scale > 0.0) || !std::isfinite(scale)) fail(ErrorCode::InvalidArgument, "--scale must be positive");
  if (depth < 0) fail(ErrorCode::InvalidArgument, "--depth must be >= 0");
  if (trials < 1) fail(ErrorCode::InvalidArgument, "--trials must be >= 1");
  if (h_list.empty()) fail(ErrorCode::InvalidArgument, "--h needs at least one depth");
  for (int h : h_list)
    if (h < 1) fail(ErrorCode::InvalidArgument, "every --h entry must be >= 1");
  if (!(within_tol > 0.0)) fail(ErrorCode::InvalidArgument, "within tolerance must be positive");
  if (A.has_value() != b.has_value()) fail(ErrorCode::InvalidArgument, "--A and --b must be given together");
  if (synthetic && synthetic->cond < 1.0) fail(ErrorCode::InvalidArgument, "cond must be >= 1");

  const std::string m = method_of(*this);
  const auto& inits = inits_by_method();
  const auto it = inits.find(m);
  if (it == inits.end()) fail(ErrorCode::InvalidArgument, "unknown method '" + m + "'");
  if (command == "control" && m != "gd") fail(ErrorCode::InvalidArgument, "control only runs plain gradient descent");
  if (!init.empty() && command != "project" && std::find(it->second.begin(), it->second.end(), init) == it->second.end())
    fail(ErrorCode::InvalidArgument, "init '" + init + "' does not apply to method '" + m + "'");
  if ((m == "deep" || m == "compact2") && init_of(*this, m) == "lemma9" && depth_of(*this, m) != 2)
    fail(ErrorCode::InvalidArgument, "the lemma9 initialization is defined for depth 2 only");
  if (m == "compact1" && depth > 1) fail(ErrorCode::InvalidArgument, "compact1 is the depth-1 iteration");
  if (m == "compact2" && depth > 2) fail(ErrorCode::InvalidArgument, "compact2 is the depth-2 iteration");
  if (target && command != "control") fail(ErrorCode::InvalidArgument, "--target applies to control only");
}

Metadata ExperimentConfig::metadata() const {
  const std::string m = method_of(*this);
  Metadata meta{{"command", command}, {"method", m}, {"seed", std::to_string(seed)}};
  if (data) {
    meta.emplace_back("data", data->filename().string());
    meta.emplace_back("scale", format_double(scale));
  } else if (A) {
    meta.emplace_back("problem", "inline");
  } else if (synthetic) {
    meta.emplace_back("synthetic", "n=" + std::to_string(synthetic->n) + ",d=" + std::to_string(synthetic->d) +
                                       ",cond=" + format_double(synthetic->cond));
  } else {
    meta.emplace_back("problem", "default");
  }
  if (command != "trials") meta.emplace_back("init", init_of(*this, m));
  meta.emplace_back("depth", std::to_string(depth_of(*this, m)));
  meta.emplace_back("alpha", gd.alpha ? format_double(*gd.alpha) : "1/||A||^2");
  meta.emplace_back("max_iters", std::to_string(gd.max_iters));
  meta.emplace_back("tol", format_double(gd.tol_residual));
  meta.emplace_back("tol_step", format_double(gd.tol_step));
  meta.emplace_back("snapshot_every", std::to_string(gd.snapshot_every));
  if (target) meta.emplace_back("target", join(*target));
  if (command == "trials") {
    std::string hs;
    for (int h : h_list) hs += (hs.empty() ? "" : ",") + std::to_string(h);
    meta.emplace_back("h", hs);
    meta.emplace_back("trials", std::to_string(trials));
  }
  return meta;
}

ProblemInstance make_problem(const ExperimentConfig& cfg) {
  if (cfg.data) return load_svmlight(*cfg.data, cfg.scale);
  if (cfg.A) return ProblemInstance(*cfg.A, *cfg.b);
  if (cfg.synthetic) return random_problem(cfg.synthetic->n, cfg.synthetic->d, cfg.synthetic->cond, {cfg.seed, kProblemStream});
  if (cfg.command == "control") return ProblemInstance((Matrix(1, 2) << 1, 1).finished(), Vector::Zero(1));
  if (cfg.command == "riemann" || cfg.command == "trials")
    return ProblemInstance((Matrix(2, 3) << 5, -3, 1, 3, 1, -1).finished(), (Vector(2) << 6, 4).finished());
  const SyntheticSpec s;
  return random_problem(s.n, s.d, s.cond, {cfg.seed, kProblemStream});
}

std::vector<double> rate_grid() {
  std::vector<double> g;
  for (int e = 1; e >= -6; --e) g.push_back(std::pow(10.0, e));
  return g;
}

bool is_stable(const IterateTrace& trace) {
  if (trace.terminated_by == Termination::Diverged || trace.records.empty()) return false;
  return trace.last().residual <= trace.records.front().residual;
}

RateSearch largest_stable_rate(const std::function<IterateTrace(double)>& run) {
  RateSearch out;
  for (double alpha : rate_grid()) {
    RateProbe probe{alpha, false, Termination::Diverged, 0, 0.0};
    try {
      const IterateTrace t = run(alpha);
      probe.stable = is_stable(t);
      probe.terminated_by = t.terminated_by;
      if (!t.records.empty()) {
        probe.iterations = t.last().k;
        probe.residual = t.last().residual;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::GammaSingular && e.code() != ErrorCode::SingularStep) throw;
    }
    out.probes.push_back(probe);
    if (probe.stable) {
      out.alpha = alpha;
      break;
    }
  }
  return out;
}

int run_experiment(const ExperimentConfig& requested, std::ostream& log) {
  requested.validate();
  std::filesystem::create_directories(requested.out);
  const ProblemInstance p = make_problem(requested);
  ExperimentConfig cfg = requested;
  // At 1/||A||^2 deep orthogonal stacks (h = 6 on the default system) keep
  // oscillating instead of settling, so orthogonal runs default to half of it.
  if (!cfg.gd.alpha && (cfg.command == "riemann" || cfg.command == "trials" || method_of(cfg) == "riemann"))
    cfg.gd.alpha = 0.5 / (p.spectral_norm() * p.spectral_norm());
  const Metadata meta = cfg.metadata();
  const std::string method = method_of(cfg);
  log << "problem: n=" << p.n() << " d=" << p.d() << " cond=" << format_double(p.condition_number()) << '\n';

  if (cfg.command == "control") {
    Vector target;
    if (cfg.target) {
      target = *cfg.target;
    } else if (p.d() == 2 && p.n() == 1) {
      target = (Vector(2) << 10, -10).finished();
    } else {
      fail(ErrorCode::InvalidArgument, "control needs --target");
    }
    if (target.size() != p.d()) fail(ErrorCode::DimensionMismatch, "--target must have d entries");
    GdRun run = run_controlled(p, target, cfg.gd);
    const std::vector<MethodRun> runs{{"control", std::move(run.trace)}};
    write_run(cfg, runs.front(), meta, log);
    log << "final iterate: " << join(run.y) << "  (distance to target " << format_double((run.y - target).norm())
        << ")\n";
    write_summary(cfg.out / "summary.csv", {summarize("control", runs.front().trace)}, meta);
    return status_of(runs);
  }

  if (cfg.command == "trials") {
    const auto stats = run_trials(p, cfg.h_list, cfg.trials, cfg.gd, {cfg.seed, kTrialStream}, cfg.threads);
    int diverged = 0;
    for (const auto& [h, st] : stats) {
      Metadata m = meta;
      m.emplace_back("histogram_h", std::to_string(h));
      write_histogram(cfg.out / ("histogram_" + std::to_string(h) + ".csv"), st.histogram, m);
      log << "h=" << h << ": median " << format_double(st.percentiles.at(50)) << ", within "
          << format_double(cfg.within_tol) << ": " << format_double(st.fraction_within(cfg.within_tol)) << '\n';
      diverged += st.diverged;
    }
    write_percentiles(cfg.out / "percentiles.csv", stats, cfg.within_tol, meta);
    std::vector<SummaryRow> rows;
    for (const auto& [h, st] : stats) {
      SummaryRow r;
      r.method = "riemann_h" + std::to_string(h);
      r.iterations = cfg.trials;
      r.terminated_by = st.diverged > 0 ? Termination::Diverged : Termination::MaxIters;
      r.dist_theta_star = st.percentiles.at(50);
      rows.push_back(r);
    }
    write_summary(cfg.out / "summary.csv", rows, meta);
    return diverged > 0 ? 3 : 0;
  }

  if (cfg.command == "project") {
    GdConfig gd = cfg.gd;
    if (gd.snapshot_every == 0) gd.snapshot_every = 10;
    std::vector<MethodRun> runs;
    for (const std::string m : {"gd", "compact1", "compact2"}) {
      ExperimentConfig sub = cfg;
      sub.init.clear();
      sub.depth = 0;
      runs.push_back(run_method(m, sub, p, gd, log));
    }
    std::vector<IterateTrace> traces;
    for (const auto& r : runs) traces.push_back(r.trace);
    const PathProjection proj = project_paths(traces, p.d(), {cfg.seed, kProjectionStream});
    std::vector<SummaryRow> rows;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      write_run(cfg, runs[i], meta, log);
      write_path(cfg.out / ("path_" + runs[i].name + ".csv"), proj, i, runs[i].trace, meta);
      rows.push_back(summarize(runs[i].name, runs[i].trace));
    }
    const Eigen::Vector2d star = proj.basis * p.theta_star();
    log << "projected min-norm solution: " << format_double(star.x()) << "," << format_double(star.y()) << '\n';
    write_summary(cfg.out / "summary.csv", rows, meta);
    return status_of(runs);
  }

  if (cfg.command == "lrgrid") {
    const RateSearch search = largest_stable_rate([&](double alpha) {
      GdConfig gd = cfg.gd;
      gd.alpha = alpha;
      std::ostringstream quiet;
      return run_method(method, cfg, p, gd, quiet).trace;
    });
    {
      std::ofstream out(cfg.out / "lrgrid.csv", std::ios::binary);
      if (!out) fail(ErrorCode::IoError, "cannot write lrgrid.csv");
      for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
      out << "alpha,stable,terminated_by,iterations,residual\n";
      for (const auto& pr : search.probes)
        out << format_double(pr.alpha) << ',' << (pr.stable ? 1 : 0) << ',' << to_string(pr.terminated_by) << ','
            << pr.iterations << ',' << format_double(pr.residual) << '\n';
    }
    if (!search.alpha) {
      log << "no stable rate in the grid\n";
      return 3;
    }
    log << "largest stable rate: " << format_double(*search.alpha) << '\n';
    GdConfig gd = cfg.gd;
    gd.alpha = search.alpha;
    const std::vector<MethodRun> runs{run_method(method, cfg, p, gd, log)};
    write_run(cfg, runs.front(), meta, log);
    write_summary(cfg.out / "summary.csv", {summarize(method, runs.front().trace)}, meta);
    return status_of(runs);
  }

  const std::vector<MethodRun> runs{run_method(method, cfg, p, cfg.gd, log)};
  write_run(cfg, runs.front(), meta, log);
  write_summary(cfg.out / "summary.csv", {summarize(method, runs.front().trace)}, meta);
  return status_of(runs);
}

}  // namespace rowspace::harness
