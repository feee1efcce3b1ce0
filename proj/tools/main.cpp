#include <cmath>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "rowspace/errors.hpp"
#include "rowspace/harness/experiment.hpp"

namespace rh = rowspace::harness;

namespace {

int exit_code_for(rowspace::ErrorCode code) {
  switch (code) {
    case rowspace::ErrorCode::ParseError:
    case rowspace::ErrorCode::EmptyFile:
    case rowspace::ErrorCode::IoError:
      return 2;
    case rowspace::ErrorCode::InvalidArgument:
    case rowspace::ErrorCode::DimensionMismatch:
      return 1;
    default:
      return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient descent on underdetermined linear systems and linear networks"};
  app.set_help_flag("--help", "Print this help message and exit");

  rh::ExperimentConfig cfg;
  std::string synthetic, target, A, b, hs;
  std::string data;
  double alpha = 0.0;

  app.add_option("command", cfg.command, "solve|control|hidden|compact1|deep|compact2|stability|riemann|trials|project|lrgrid")
      ->required()
      ->check(CLI::IsMember(rh::known_commands()));
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--alpha", alpha, "step size (default 1/||A||^2)");
  app.add_option("--max-iters", cfg.gd.max_iters, "iteration cap");
  app.add_option("--tol", cfg.gd.tol_residual, "stop when ||Ay - b|| <= tol * ||b||");
  app.add_option("--tol-step", cfg.gd.tol_step, "stop when an iterate moves by at most this much");
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--synthetic", synthetic, "random problem, e.g. n=20,d=100,cond=10");
  app.add_option("--data", data, "svmlight file")->check(CLI::ExistingFile);
  app.add_option("--A", A, "inline coefficient matrix, rows separated by ';'");
  app.add_option("--b", b, "inline target vector");
  app.add_option("--scale", cfg.scale, "divide A and b by this constant");
  app.add_option("--depth", cfg.depth, "number of hidden layers");
  app.add_option("--trials", cfg.trials, "trials per depth");
  app.add_option("--h", hs, "depth list for trials, e.g. 1,3,6");
  app.add_option("--snapshot-every", cfg.gd.snapshot_every, "keep every k-th effective predictor");
  app.add_option("--method", cfg.method, "gd|hidden|compact1|deep|compact2|riemann|stability");
  app.add_option("--init", cfg.init, "initialization scheme for the method");
  app.add_option("--target", target, "target interpolant for control");
  app.add_option("--threads", cfg.threads, "worker threads for trials (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.count("--alpha")) cfg.gd.alpha = alpha;
    if (!synthetic.empty()) cfg.synthetic = rh::parse_synthetic(synthetic);
    if (!data.empty()) cfg.data = data;
    if (!A.empty()) cfg.A = rh::parse_matrix(A);
    if (!b.empty()) cfg.b = rh::parse_vector(b);
    if (!target.empty()) cfg.target = rh::parse_vector(target);
    if (!hs.empty()) {
      cfg.h_list.clear();
      for (double h : rh::parse_list(hs)) {
        if (h != std::floor(h)) rowspace::fail(rowspace::ErrorCode::InvalidArgument, "--h entries must be integers");
        cfg.h_list.push_back(static_cast<int>(h));
      }
    }
    const int status = rh::run_experiment(cfg, std::cout);
    if (status != 0) std::cerr << "error: Diverged: at least one run diverged\n";
    return status;
  } catch (const rowspace::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
