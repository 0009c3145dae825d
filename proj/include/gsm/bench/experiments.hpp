#pragma once

// Recovery experiments and kernel accuracy / timing suites.

#include "gsm/baselines.hpp"
#include "gsm/bench/datagen.hpp"
#include "gsm/bench/metrics.hpp"
#include "gsm/optimizer.hpp"
#include "gsm/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gsm {

// Runs fn(0..count-1) on up to `threads` workers; the first exception is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

// Recognized methods: gsm2, gsm1, irls, irl1, dc, ls_omp, lasso.
const std::vector<std::string>& recovery_methods();

struct RecoverySpec {
  MatrixKind matrix = MatrixKind::Uncorrelated;
  double rho = 0.8;
  SignalKind signal = SignalKind::Gaussian;
  Index n = 100;
  Index d = 800;
  std::vector<Index> ks{16, 24, 30};
  double nu = 1e-6;
  int trials = 50;
  std::uint64_t seed = 1;
  std::vector<std::string> methods{"gsm2", "ls_omp"};
  int threads = 1;
  bool full_scale = false;  // 200 trials and a 50-point lambda grid
  P0Config gsm{};           // grid_size defaults to 20 here; power is set per method
  LpConfig lp{};
  std::vector<double> lp_p_grid = LpSweepConfig{}.p_grid;
  int lp_lambda_count = 90;
  double dc_eta = 1e-6;

  RecoverySpec() { gsm.grid_size = 20; }
  void validate() const;
  // Applies full_scale overrides.
  RecoverySpec effective() const;
};

struct ResultRow {
  Index k = 0;
  int trial = 0;
  std::string method;
  double lambda = 0.0;  // NaN for methods without a penalty parameter
  RecoveryMetrics metrics;
  double seconds = 0.0;
};

struct RecoverySummary {
  std::string method;
  Index k = 0;
  int trials = 0;
  double success_obj_rate = 0.0;
  double success_rec_rate = 0.0;
  double mean_rec_err = 0.0;
  double mean_supp_prec = 0.0;
  double mean_seconds = 0.0;
};

struct RecoveryReport {
  std::vector<ResultRow> rows;          // ordered by k, trial, method
  std::vector<RecoverySummary> summary;  // ordered by k, method
};

struct RecoveryInstance {
  Matrix A;
  Vector x0;
  Vector y;
};

RecoveryInstance make_recovery_instance(const RecoverySpec& spec, Index k, int trial);

// k-sparse estimate of one method and the lambda it used.
std::pair<Vector, double> run_method(const std::string& method, const ProblemInstance& p, const RecoverySpec& spec);

RecoveryReport run_recovery(const RecoverySpec& spec);

std::vector<RecoverySummary> summarize(const std::vector<ResultRow>& rows, const std::vector<std::string>& methods);

// Writes rows.csv and summary.csv into dir (created if missing).
void write_recovery(const RecoveryReport& report, const std::string& dir);

enum class KernelDist { Uniform, AbsNormal };
KernelDist parse_kernel_dist(const std::string& s);
std::string to_string(KernelDist dist);

// z_i ~ U(0,1) or |N(0,1)|.
Vector gen_kernel_input(KernelDist dist, Index d, std::uint64_t key);

// 1e-20, 1e-10, 1e-5, 1e-2, 0.2:0.2:1, 2:2:10, 1e2, 1e5, 1e10, 1e20.
std::vector<double> kernel_gamma_grid();

struct KernelAccuracySpec {
  std::vector<Index> dims{1000};
  std::vector<Index> ks{10, 100, 500};
  std::vector<double> gammas = kernel_gamma_grid();
  std::vector<KernelDist> dists{KernelDist::Uniform, KernelDist::AbsNormal};
  int trials = 20;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
};

struct KernelAccuracyRow {
  Index d = 0;
  Index k = 0;
  double gamma = 0.0;
  KernelDist dist = KernelDist::Uniform;
  int trials = 0;
  double max_mu_err = 0.0;     // |mu - mu_ref| / |mu_ref|
  double max_theta_err = 0.0;  // (1/k) ||theta - theta_ref||_inf
  bool theta_in_unit = true;   // every theta_i in [0, 1]
};

std::vector<KernelAccuracyRow> run_kernel_accuracy(const KernelAccuracySpec& spec);
void write_kernel_accuracy(const std::vector<KernelAccuracyRow>& rows, const std::string& path);

struct KernelTimingSpec {
  // (d, k) cells.
  std::vector<std::pair<Index, Index>> cells{{1000, 100}, {10000, 100}, {100000, 100}, {10000, 10}, {10000, 500}};
  double gamma = 1.0;
  KernelDist dist = KernelDist::Uniform;
  int trials = 10;
  std::uint64_t seed = 1;

  void validate() const;
};

struct KernelTimingRow {
  Index d = 0;
  Index k = 0;
  int trials = 0;
  double mean_seconds = 0.0;
  double min_seconds = 0.0;
};

std::vector<KernelTimingRow> run_kernel_timing(const KernelTimingSpec& spec);
void write_kernel_timing(const std::vector<KernelTimingRow>& rows, const std::string& path);

}  // namespace gsm
