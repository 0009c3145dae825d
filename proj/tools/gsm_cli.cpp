#include "gsm/bench/config.hpp"
#include "gsm/bench/experiments.hpp"
#include "gsm/bench/io.hpp"
#include "gsm/kernel.hpp"
#include "gsm/kernel_oracles.hpp"
#include "gsm/objective.hpp"
#include "gsm/optimizer.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace gsm;

double parse_gamma(const std::string& s) {
  if (s == "inf" || s == "+inf") return kInf;
  if (s == "-inf") return -kInf;
  std::size_t pos = 0;
  double g = 0.0;
  try {
    g = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("invalid gamma '" + s + "'");
  }
  if (pos != s.size() || std::isnan(g)) throw ConfigError("invalid gamma '" + s + "'");
  return g;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "' for reading");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_kernel(double mu, const Vector& theta) {
  std::cout << "mu," << format_double(mu) << '\n';
  std::cout << "theta";
  for (Index i = 0; i < theta.size(); ++i) std::cout << ',' << format_double(theta(i));
  std::cout << '\n';
}

struct KernelEvalArgs {
  std::string input;
  Index k = 0;
  std::string gamma;
  bool brute = false;
  bool highprec = false;
};

void kernel_eval(const KernelEvalArgs& a) {
  const Vector z = read_vector(a.input);
  const double gamma = parse_gamma(a.gamma);
  if (a.brute) {
    const MuTheta r = brute_force_mu_theta(z, a.k, gamma);
    print_kernel(r.mu, r.theta);
  } else if (a.highprec) {
    if (gamma < 0 || 2 * a.k > z.size())
      throw ConfigError("--highprec requires gamma >= 0 and k <= d/2");
    const HighPrecMuTheta r = highprec_mu_theta(z, a.k, gamma);
    print_kernel(r.rounded.mu, r.rounded.theta);
  } else {
    const GsmKernelResult r = mu_theta_full(z, a.k, gamma);
    print_kernel(r.mu, r.theta);
  }
}

struct SolveArgs {
  std::string matrix;
  std::string y;
  Index k = 0;
  int power = 2;
  double lambda = -1.0;
  int grid = 0;
  std::uint64_t seed = 1;
  std::string config;
  int threads = 1;
  std::string out;
};

void solve(const SolveArgs& a) {
  Matrix A = read_matrix(a.matrix);
  Vector y = read_vector(a.y);
  if (y.size() != A.rows()) throw ConfigError("y length does not match the matrix rows");
  const ProblemInstance p(std::move(A), std::move(y), a.k);
  P0Config cfg;
  if (!a.config.empty()) cfg.homotopy = parse_homotopy_config(read_text(a.config));
  cfg.homotopy.power = a.power == 1 ? Power::One : Power::Two;
  cfg.threads = a.threads;
  Solution s;
  if (a.lambda >= 0) {
    s = homotopy_solve(p, a.lambda, cfg.homotopy);
  } else {
    if (a.grid > 0) cfg.grid_size = a.grid;
    s = solve_p0(p, cfg).best;
  }
  write_matrix_csv(a.out, s.x_sparse);
  std::cout << "lambda," << format_double(s.lambda) << '\n'
            << "objective," << format_double(s.objective) << '\n'
            << "residual_norm," << format_double(s.residual_norm) << '\n'
            << "seed," << a.seed << '\n';
}

struct ThresholdArgs {
  std::string matrix;
  std::string y;
  Index k = 0;
};

void print_thresholds(const ThresholdArgs& a) {
  Matrix A = read_matrix(a.matrix);
  Vector y = read_vector(a.y);
  if (y.size() != A.rows()) throw ConfigError("y length does not match the matrix rows");
  const ProblemInstance p(std::move(A), std::move(y), a.k);
  const PenaltyThresholds t = thresholds(p);
  std::cout << "lambda_bar," << format_double(t.lambda_bar) << '\n'
            << "lambda_a," << format_double(t.lambda_a) << '\n'
            << "lambda_b," << format_double(t.lambda_b) << '\n';
}

std::vector<KernelDist> parse_dists(const std::vector<std::string>& names) {
  std::vector<KernelDist> out;
  for (const auto& n : names) out.push_back(parse_kernel_dist(n));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse approximation with the generalized soft-min penalty"};
  app.require_subcommand(0, 1);
  bool print_config = false;
  app.add_flag("--print-config", print_config, "Print all defaults as JSON and exit");

  KernelEvalArgs ke;
  auto* kernel = app.add_subcommand("kernel", "Kernel evaluation");
  kernel->require_subcommand(1);
  auto* keval = kernel->add_subcommand("eval", "Evaluate mu and theta");
  keval->add_option("--input", ke.input, "Vector z (CSV)")->required();
  keval->add_option("--k", ke.k, "Subset size")->required();
  keval->add_option("--gamma", ke.gamma, "Temperature (inf and -inf allowed)")->required();
  auto* brute = keval->add_flag("--brute", ke.brute, "Subset enumeration");
  keval->add_flag("--highprec", ke.highprec, "Double-double evaluation")->excludes(brute);

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "Best subset selection");
  solve_cmd->add_option("--matrix", sa.matrix, "Matrix A (CSV or .bin)")->required();
  solve_cmd->add_option("--y", sa.y, "Observation vector (CSV)")->required();
  solve_cmd->add_option("--k", sa.k, "Sparsity")->required();
  solve_cmd->add_option("--power", sa.power, "Residual power")->check(CLI::IsMember({1, 2}));
  auto* lam = solve_cmd->add_option("--lambda", sa.lambda, "Single penalty value")->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--lambda-grid", sa.grid, "Grid size for the lambda sweep")
      ->check(CLI::PositiveNumber)
      ->excludes(lam);
  solve_cmd->add_option("--seed", sa.seed, "Seed recorded with the solution");
  solve_cmd->add_option("--config", sa.config, "Homotopy settings (JSON)");
  solve_cmd->add_option("--threads", sa.threads, "Worker threads for the sweep")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--out", sa.out, "Solution file (CSV column)")->required();

  ThresholdArgs ta;
  auto* thr = app.add_subcommand("thresholds", "Penalty thresholds");
  thr->add_option("--matrix", ta.matrix, "Matrix A (CSV or .bin)")->required();
  thr->add_option("--y", ta.y, "Observation vector (CSV)")->required();
  thr->add_option("--k", ta.k, "Sparsity")->required();

  auto* bench = app.add_subcommand("bench", "Benchmarks");
  bench->require_subcommand(1);

  std::string rec_config, rec_out;
  int rec_threads = 0;
  auto* rec = bench->add_subcommand("recovery", "Recovery experiment");
  rec->add_option("--config", rec_config, "Recovery configuration (JSON)");
  rec->add_option("--out", rec_out, "Output directory")->required();
  rec->add_option("--threads", rec_threads, "Worker threads")->check(CLI::PositiveNumber);

  KernelAccuracySpec kas;
  std::vector<std::string> ka_dists{"uniform", "abs_normal"};
  std::string ka_out;
  auto* ka = bench->add_subcommand("kernel-accuracy", "Kernel accuracy against double-double");
  ka->add_option("--d", kas.dims, "Dimensions");
  ka->add_option("--k", kas.ks, "Subset sizes");
  ka->add_option("--gamma", kas.gammas, "Temperatures");
  ka->add_option("--dist", ka_dists, "Input distributions");
  ka->add_option("--trials", kas.trials, "Instances per cell")->check(CLI::PositiveNumber);
  ka->add_option("--seed", kas.seed, "Seed");
  ka->add_option("--threads", kas.threads, "Worker threads")->check(CLI::PositiveNumber);
  ka->add_option("--out", ka_out, "Output CSV")->required();

  KernelTimingSpec kts;
  std::vector<Index> kt_d, kt_k;
  std::string kt_dist = "uniform", kt_out;
  auto* kt = bench->add_subcommand("kernel-timing", "Kernel timing");
  kt->add_option("--d", kt_d, "Dimensions, paired with --k");
  kt->add_option("--k", kt_k, "Subset sizes, paired with --d");
  kt->add_option("--gamma", kts.gamma, "Temperature");
  kt->add_option("--dist", kt_dist, "Input distribution");
  kt->add_option("--trials", kts.trials, "Repetitions per cell")->check(CLI::PositiveNumber);
  kt->add_option("--seed", kts.seed, "Seed");
  kt->add_option("--out", kt_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (print_config) {
      std::cout << default_config_json() << '\n';
      return 0;
    }
    if (keval->parsed()) {
      kernel_eval(ke);
    } else if (solve_cmd->parsed()) {
      solve(sa);
    } else if (thr->parsed()) {
      print_thresholds(ta);
    } else if (rec->parsed()) {
      RecoverySpec spec = rec_config.empty() ? RecoverySpec{} : load_recovery_spec(rec_config);
      if (rec_threads > 0) spec.threads = rec_threads;
      const RecoveryReport report = run_recovery(spec);
      write_recovery(report, rec_out);
      for (const auto& s : report.summary)
        std::cout << "k=" << s.k << " method=" << s.method << " success_obj=" << format_double(s.success_obj_rate)
                  << " success_rec=" << format_double(s.success_rec_rate) << '\n';
    } else if (ka->parsed()) {
      kas.dists = parse_dists(ka_dists);
      write_kernel_accuracy(run_kernel_accuracy(kas), ka_out);
    } else if (kt->parsed()) {
      if (kt_d.size() != kt_k.size()) throw ConfigError("--d and --k must have the same length");
      if (!kt_d.empty()) {
        kts.cells.clear();
        for (std::size_t i = 0; i < kt_d.size(); ++i) kts.cells.emplace_back(kt_d[i], kt_k[i]);
      }
      kts.dist = parse_kernel_dist(kt_dist);
      write_kernel_timing(run_kernel_timing(kts), kt_out);
    } else {
      std::cout << app.help();
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
