#include "gsm/bench/experiments.hpp"

#include "gsm/bench/io.hpp"
#include "gsm/bench/rng.hpp"
#include "gsm/kernel.hpp"
#include "gsm/kernel_oracles.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <mutex>
#include <thread>

namespace gsm {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string flag(bool b) { return b ? "1" : "0"; }

}  // namespace

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads < 1) throw ConfigError("parallel_for: threads must be >= 1");
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

const std::vector<std::string>& recovery_methods() {
  static const std::vector<std::string> methods{"gsm2", "gsm1", "irls", "irl1", "dc", "ls_omp", "lasso"};
  return methods;
}

void RecoverySpec::validate() const {
  if (n < 1 || d < 2) throw ConfigError("recovery spec: requires n >= 1 and d >= 2");
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("recovery spec: rho must lie in [0, 1)");
  if (!(nu >= 0.0 && nu <= 1.0)) throw ConfigError("recovery spec: nu must lie in [0, 1]");
  if (trials < 1) throw ConfigError("recovery spec: trials must be >= 1");
  if (threads < 1) throw ConfigError("recovery spec: threads must be >= 1");
  if (ks.empty()) throw ConfigError("recovery spec: k list is empty");
  for (Index k : ks)
    if (k < 1 || k >= d || k > n) throw ConfigError("recovery spec: every k must satisfy 1 <= k <= n and k < d");
  if (methods.empty()) throw ConfigError("recovery spec: method list is empty");
  const auto& known = recovery_methods();
  for (const auto& m : methods)
    if (std::find(known.begin(), known.end(), m) == known.end())
      throw ConfigError("recovery spec: unknown method '" + m + "'");
  if (lp_lambda_count < 1) throw ConfigError("recovery spec: lp lambda_count must be >= 1");
  if (!(dc_eta >= 0.0)) throw ConfigError("recovery spec: dc eta must be >= 0");
  gsm.validate();
  LpSweepConfig lps;
  lps.p_grid = lp_p_grid;
  lps.lp = lp;
  lps.validate();
}

RecoverySpec RecoverySpec::effective() const {
  RecoverySpec s = *this;
  if (s.full_scale) {
    s.trials = 200;
    s.gsm.grid_size = 50;
  }
  return s;
}

RecoveryInstance make_recovery_instance(const RecoverySpec& spec, Index k, int trial) {
  const std::uint64_t seed = instance_seed(spec.seed, k, trial);
  RecoveryInstance inst;
  inst.A = gen_matrix(spec.matrix, spec.n, spec.d, spec.rho, seed, true);
  inst.x0 = gen_signal(spec.signal, spec.d, k, seed);
  inst.y = inst.A * inst.x0 + gen_noise(inst.A, spec.signal, k, spec.nu, seed);
  return inst;
}

std::pair<Vector, double> run_method(const std::string& method, const ProblemInstance& p, const RecoverySpec& spec) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (method == "gsm2" || method == "gsm1") {
    P0Config cfg = spec.gsm;
    cfg.homotopy.power = method == "gsm2" ? Power::Two : Power::One;
    const P0Result r = solve_p0(p, cfg);
    return {r.best.x_sparse, r.best.lambda};
  }
  if (method == "ls_omp") return {ls_omp(p, p.k()), nan};
  if (method == "irls" || method == "irl1") {
    LpSweepConfig cfg;
    cfg.p_grid = spec.lp_p_grid;
    cfg.lp = spec.lp;
    for (int i = 1; i <= spec.lp_lambda_count; ++i) cfg.lambda_grid.push_back(1e-8 * std::pow(1.5, i - 1));
    return {lp_sweep(p, method == "irls" ? LpMethod::Irls : LpMethod::Irl1, cfg), nan};
  }
  if (method == "dc") {
    P0Config cfg = spec.gsm;
    cfg.homotopy.power = Power::Two;
    const auto grid = lambda_grid(p, cfg);
    Vector best;
    double best_res = kInf, best_lambda = nan;
    for (double lambda : grid) {
      const BaselineResult r = dc_trimmed_lasso(p, lambda, spec.dc_eta, Vector::Zero(p.d()));
      Vector x = project_and_refit(p, r.x);
      const double res = (p.A() * x - p.y()).norm();
      if (res < best_res) {
        best_res = res;
        best = std::move(x);
        best_lambda = lambda;
      }
    }
    return {best, best_lambda};
  }
  if (method == "lasso") {
    const auto grid = lasso_grid(p);
    const auto xs = lasso_sweep(p, grid);
    Vector best;
    double best_res = kInf, best_lambda = nan;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      Vector x = project_and_refit(p, xs[i]);
      const double res = (p.A() * x - p.y()).norm();
      if (res < best_res) {
        best_res = res;
        best = std::move(x);
        best_lambda = grid[i];
      }
    }
    return {best, best_lambda};
  }
  throw ConfigError("unknown method '" + method + "'");
}

std::vector<RecoverySummary> summarize(const std::vector<ResultRow>& rows, const std::vector<std::string>& methods) {
  std::vector<Index> ks;
  for (const auto& r : rows)
    if (std::find(ks.begin(), ks.end(), r.k) == ks.end()) ks.push_back(r.k);
  std::vector<RecoverySummary> out;
  for (Index k : ks)
    for (const auto& m : methods) {
      RecoverySummary s;
      s.method = m;
      s.k = k;
      for (const auto& r : rows) {
        if (r.k != k || r.method != m) continue;
        ++s.trials;
        s.success_obj_rate += r.metrics.success_obj ? 1.0 : 0.0;
        s.success_rec_rate += r.metrics.success_rec ? 1.0 : 0.0;
        s.mean_rec_err += r.metrics.rec_err;
        s.mean_supp_prec += r.metrics.supp_prec;
        s.mean_seconds += r.seconds;
      }
      if (s.trials == 0) continue;
      const double t = s.trials;
      s.success_obj_rate /= t;
      s.success_rec_rate /= t;
      s.mean_rec_err /= t;
      s.mean_supp_prec /= t;
      s.mean_seconds /= t;
      out.push_back(s);
    }
  return out;
}

RecoveryReport run_recovery(const RecoverySpec& spec_in) {
  spec_in.validate();
  const RecoverySpec spec = spec_in.effective();
  const std::size_t jobs = spec.ks.size() * static_cast<std::size_t>(spec.trials);
  std::vector<std::vector<ResultRow>> per_job(jobs);
  // Parallelism is over instances; each solve runs single-threaded.
  RecoverySpec inner = spec;
  inner.gsm.threads = 1;
  parallel_for(jobs, spec.threads, [&](std::size_t j) {
    const Index k = spec.ks[j / static_cast<std::size_t>(spec.trials)];
    const int trial = static_cast<int>(j % static_cast<std::size_t>(spec.trials));
    const RecoveryInstance inst = make_recovery_instance(spec, k, trial);
    const ProblemInstance p(inst.A, inst.y, k);
    for (const auto& m : spec.methods) {
      const auto t0 = std::chrono::steady_clock::now();
      auto [x, lambda] = run_method(m, p, inner);
      ResultRow row;
      row.seconds = seconds_since(t0);
      row.k = k;
      row.trial = trial;
      row.method = m;
      row.lambda = lambda;
      if (count_nonzeros(x) > k) throw NumericError("run_recovery: method '" + m + "' returned more than k nonzeros");
      row.metrics = evaluate_recovery(inst.A, inst.y, x, inst.x0, spec.nu);
      per_job[j].push_back(std::move(row));
    }
  });
  RecoveryReport report;
  for (auto& rows : per_job)
    for (auto& r : rows) report.rows.push_back(std::move(r));
  report.summary = summarize(report.rows, spec.methods);
  return report;
}

void write_recovery(const RecoveryReport& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create directory '" + dir + "'");
  const std::string base = dir.empty() ? "" : dir + "/";
  CsvWriter rows(base + "rows.csv", {"k", "trial", "method", "lambda", "norm_obj", "rec_err", "supp_prec",
                                     "success_obj", "success_rec", "seconds"});
  for (const auto& r : report.rows)
    rows.row({std::to_string(r.k), std::to_string(r.trial), r.method, format_double(r.lambda),
              format_double(r.metrics.norm_obj), format_double(r.metrics.rec_err), format_double(r.metrics.supp_prec),
              flag(r.metrics.success_obj), flag(r.metrics.success_rec), format_double(r.seconds)});
  CsvWriter sum(base + "summary.csv", {"k", "method", "trials", "success_obj_rate", "success_rec_rate",
                                       "mean_rec_err", "mean_supp_prec", "mean_seconds"});
  for (const auto& s : report.summary)
    sum.row({std::to_string(s.k), s.method, std::to_string(s.trials), format_double(s.success_obj_rate),
             format_double(s.success_rec_rate), format_double(s.mean_rec_err), format_double(s.mean_supp_prec),
             format_double(s.mean_seconds)});
}

KernelDist parse_kernel_dist(const std::string& s) {
  if (s == "uniform") return KernelDist::Uniform;
  if (s == "abs_normal") return KernelDist::AbsNormal;
  throw ConfigError("unknown kernel input distribution '" + s + "'");
}

std::string to_string(KernelDist dist) { return dist == KernelDist::Uniform ? "uniform" : "abs_normal"; }

Vector gen_kernel_input(KernelDist dist, Index d, std::uint64_t key) {
  CounterRng rng(key);
  Vector z(d);
  for (Index i = 0; i < d; ++i) z[i] = dist == KernelDist::Uniform ? rng.uniform() : std::abs(rng.normal());
  return z;
}

std::vector<double> kernel_gamma_grid() {
  return {1e-20, 1e-10, 1e-5, 1e-2, 0.2, 0.4, 0.6, 0.8, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 1e2, 1e5, 1e10, 1e20};
}

void KernelAccuracySpec::validate() const {
  if (dims.empty() || ks.empty() || gammas.empty() || dists.empty())
    throw ConfigError("kernel accuracy: empty parameter list");
  if (trials < 1 || threads < 1) throw ConfigError("kernel accuracy: trials and threads must be >= 1");
  for (Index d : dims)
    for (Index k : ks)
      if (k < 1 || 2 * k > d) throw ConfigError("kernel accuracy: requires 1 <= k <= d/2");
  for (double g : gammas)
    if (!(g > 0.0) || std::isinf(g)) throw ConfigError("kernel accuracy: gammas must be finite and positive");
}

namespace {

std::uint64_t kernel_key(std::uint64_t seed, Index d, KernelDist dist, int trial) {
  const std::uint64_t index = (static_cast<std::uint64_t>(d) << 24) ^ (static_cast<std::uint64_t>(dist) << 20) ^
                              static_cast<std::uint64_t>(trial);
  return derive_key(seed, StreamTag::Kernel, index);
}

}  // namespace

std::vector<KernelAccuracyRow> run_kernel_accuracy(const KernelAccuracySpec& spec) {
  spec.validate();
  std::vector<KernelAccuracyRow> rows;
  for (Index d : spec.dims)
    for (Index k : spec.ks)
      for (KernelDist dist : spec.dists)
        for (double g : spec.gammas) {
          KernelAccuracyRow r;
          r.d = d;
          r.k = k;
          r.gamma = g;
          r.dist = dist;
          r.trials = spec.trials;
          rows.push_back(r);
        }
  parallel_for(rows.size(), spec.threads, [&](std::size_t i) {
    KernelAccuracyRow& r = rows[i];
    for (int t = 0; t < spec.trials; ++t) {
      const Vector z = gen_kernel_input(r.dist, r.d, kernel_key(spec.seed, r.d, r.dist, t));
      const GsmKernelResult got = mu_theta(z, r.k, r.gamma);
      const HighPrecMuTheta ref = highprec_mu_theta(z, r.k, r.gamma);
      const double ref_mu = static_cast<double>(ref.mu);
      const double mu_err = std::abs(static_cast<double>(dd::DoubleDouble(got.mu) - ref.mu)) / std::abs(ref_mu);
      const double th_err = (got.theta - ref.rounded.theta).lpNorm<Eigen::Infinity>() / static_cast<double>(r.k);
      r.max_mu_err = std::max(r.max_mu_err, mu_err);
      r.max_theta_err = std::max(r.max_theta_err, th_err);
      if (got.theta.minCoeff() < 0.0 || got.theta.maxCoeff() > 1.0) r.theta_in_unit = false;
    }
  });
  return rows;
}

void write_kernel_accuracy(const std::vector<KernelAccuracyRow>& rows, const std::string& path) {
  CsvWriter out(path, {"d", "k", "gamma", "dist", "trials", "max_mu_err", "max_theta_err", "theta_in_unit"});
  for (const auto& r : rows)
    out.row({std::to_string(r.d), std::to_string(r.k), format_double(r.gamma), to_string(r.dist),
             std::to_string(r.trials), format_double(r.max_mu_err), format_double(r.max_theta_err),
             flag(r.theta_in_unit)});
}

void KernelTimingSpec::validate() const {
  if (cells.empty() || trials < 1) throw ConfigError("kernel timing: requires cells and trials >= 1");
  for (const auto& [d, k] : cells)
    if (k < 1 || 2 * k > d) throw ConfigError("kernel timing: requires 1 <= k <= d/2");
  if (!(gamma > 0.0) || std::isinf(gamma)) throw ConfigError("kernel timing: gamma must be finite and positive");
}

std::vector<KernelTimingRow> run_kernel_timing(const KernelTimingSpec& spec) {
  spec.validate();
  std::vector<KernelTimingRow> rows;
  for (const auto& [d, k] : spec.cells) {
    KernelTimingRow r;
    r.d = d;
    r.k = k;
    r.trials = spec.trials;
    r.min_seconds = kInf;
    double sink = 0.0;
    for (int t = 0; t < spec.trials; ++t) {
      const Vector z = gen_kernel_input(spec.dist, d, kernel_key(spec.seed, d, spec.dist, t));
      const auto t0 = std::chrono::steady_clock::now();
      const GsmKernelResult res = mu_theta(z, k, spec.gamma);
      const double s = seconds_since(t0);
      sink += res.mu;
      r.mean_seconds += s;
      r.min_seconds = std::min(r.min_seconds, s);
    }
    r.mean_seconds /= spec.trials;
    if (!std::isfinite(sink)) throw NumericError("kernel timing: non-finite result");
    rows.push_back(r);
  }
  return rows;
}

void write_kernel_timing(const std::vector<KernelTimingRow>& rows, const std::string& path) {
  CsvWriter out(path, {"d", "k", "trials", "mean_seconds", "min_seconds"});
  for (const auto& r : rows)
    out.row({std::to_string(r.d), std::to_string(r.k), std::to_string(r.trials), format_double(r.mean_seconds),
             format_double(r.min_seconds)});
}

}  // namespace gsm
