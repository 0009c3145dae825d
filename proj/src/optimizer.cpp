#include "gsm/optimizer.hpp"

#include "gsm/greedy.hpp"
#include "gsm/kernel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace gsm {

namespace {

struct Evaluated {
  double F = 0.0;
  Vector w;
};

Evaluated evaluate(const ProblemInstance& p, const Vector& x, double lambda, double gamma, Power power) {
  PenaltyWeights tw = tau_and_weights(x, p.k(), gamma);
  return {residual_term(p, x, power) + lambda * tw.tau, std::move(tw.w)};
}

Wl1Result inner_solve(const ProblemInstance& p, const Vector& w, double lambda, const Vector& x0,
                      const HomotopyConfig& cfg, const Vector* dual) {
  if (cfg.power == Power::Two) return solve_wl1_power2(p, w, lambda, x0, cfg.inner_power2);
  return solve_wl1_power1(p, w, lambda, x0, cfg.inner_power1, dual);
}

bool same_support(const std::vector<Index>& a, const std::vector<Index>& b) { return a == b; }

double top_minus_bottom(const Vector& x, Index k) {
  std::vector<double> a(x.size());
  for (Index i = 0; i < x.size(); ++i) a[i] = std::abs(x[i]);
  std::sort(a.begin(), a.end());
  double top = 0.0, bottom = 0.0;
  for (Index i = 0; i < k; ++i) {
    bottom += a[i];
    top += a[a.size() - 1 - i];
  }
  return top - bottom;
}

}  // namespace

void HomotopyConfig::validate() const {
  if (!(delta0 > 0.0) || !(delta_gamma > 0.0) || !(delta_gamma_big > 0.0) || !(eps_x > 0.0) || !(eps_w > 0.0) ||
      !(mm_rel_tol_single > 0.0) || !(mm_rel_tol_double > 0.0))
    throw ConfigError("HomotopyConfig: parameters must be positive");
  if (!(delta_gamma < delta_gamma_big)) throw ConfigError("HomotopyConfig: requires delta_gamma < delta_gamma_big");
  if (n_gamma < 1 || sparse_stop_iters < 1 || wsparse_stop_iters < 1 || mm_max_iters < 1 || max_gamma_steps < 1)
    throw ConfigError("HomotopyConfig: counts must be >= 1");
  inner_power1.validate();
  inner_power2.validate();
}

MmResult mm_solve(const ProblemInstance& p, double lambda, double gamma, const Vector& x0, const HomotopyConfig& cfg,
                  const Vector* dual0) {
  cfg.validate();
  if (std::isnan(gamma) || gamma < 0.0) throw ConfigError("mm_solve: requires gamma in [0, inf]");
  if (!(lambda >= 0.0) || std::isinf(lambda)) throw ConfigError("mm_solve: requires finite lambda >= 0");
  if (x0.size() != p.d()) throw ConfigError("mm_solve: x0 must have length d");
  const Index d = p.d(), k = p.k();
  MmResult res;
  if (dual0) res.dual = *dual0;
  const Vector* dual = dual0;

  if (gamma == 0.0) {
    const Vector w = Vector::Constant(d, static_cast<double>(d - k) / static_cast<double>(d));
    res.objectives.push_back(evaluate(p, x0, lambda, 0.0, cfg.power).F);
    Wl1Result r = inner_solve(p, w, lambda, x0, cfg, dual);
    const double F = evaluate(p, r.x, lambda, 0.0, cfg.power).F;
    res.iterations = 1;
    if (F <= res.objectives.front()) {
      res.x = std::move(r.x);
      res.dual = std::move(r.dual);
      res.objective = F;
    } else {
      res.x = x0;
      res.objective = res.objectives.front();
    }
    res.objectives.push_back(res.objective);
    return res;
  }

  Vector x = x0;
  Evaluated cur = evaluate(p, x, lambda, gamma, cfg.power);
  res.objectives.push_back(cur.F);
  int near = 0;
  for (int t = 0; t < cfg.mm_max_iters; ++t) {
    Wl1Result r = inner_solve(p, cur.w, lambda, x, cfg, res.dual.size() ? &res.dual : nullptr);
    ++res.iterations;
    Evaluated next = evaluate(p, r.x, lambda, gamma, cfg.power);
    if (!(next.F < cur.F)) break;
    const double prev = cur.F;
    x = std::move(r.x);
    if (r.dual.size()) res.dual = std::move(r.dual);
    cur = std::move(next);
    res.objectives.push_back(cur.F);
    if (cur.F >= (1.0 - cfg.mm_rel_tol_single) * prev) break;
    near = cur.F >= (1.0 - cfg.mm_rel_tol_double) * prev ? near + 1 : 0;
    if (near >= 2) break;
  }
  res.x = std::move(x);
  res.objective = cur.F;
  return res;
}

bool is_ambiguous(const Vector& x, Index k) {
  const Index d = x.size();
  if (k <= 0 || k >= d) return false;
  std::vector<double> a(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) a[i] = std::abs(x[i]);
  std::nth_element(a.begin(), a.begin() + k, a.end(), std::greater<double>());
  const double next = a[k];
  const double kth = *std::min_element(a.begin(), a.begin() + k);
  const double top = *std::max_element(a.begin(), a.begin() + k);
  return kth - next <= 1e-9 * (top + 1e-300);
}

Vector project_and_refit(const ProblemInstance& p, const Vector& x) {
  std::vector<Index> S;
  for (Index i : top_k_support(x, p.k()))
    if (x[i] != 0.0) S.push_back(i);
  return least_squares_on_support(p, S);
}

Vector postprocess_ambiguous(const ProblemInstance& p, const Vector& x, double lambda, PostprocessMode mode,
                             Power power) {
  const Index k = p.k();
  if (mode == PostprocessMode::None || !is_ambiguous(x, k)) return x;
  if (mode == PostprocessMode::Auto) mode = p.d() <= 1000 ? PostprocessMode::LsOmp : PostprocessMode::OmpStep;
  if (k > p.n()) return x;
  std::vector<double> a(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i) a[i] = std::abs(x[i]);
  std::nth_element(a.begin(), a.begin() + k, a.end(), std::greater<double>());
  const double level = a[k];
  const double margin = 1e-9 * (x.cwiseAbs().maxCoeff() + 1e-300);
  std::vector<Index> base;
  for (Index i = 0; i < x.size(); ++i)
    if (x[i] != 0.0 && std::abs(x[i]) > level + margin) base.push_back(i);
  const auto S = mode == PostprocessMode::LsOmp ? ls_omp_complete(p, base, k) : omp_complete(p, x, base, k);
  Vector xn = least_squares_on_support(p, S);
  const double Fx = objective_value(p, x, lambda, kInf, power);
  const double Fn = objective_value(p, xn, lambda, kInf, power);
  return Fn < Fx ? xn : x;
}

Solution homotopy_solve(const ProblemInstance& p, double lambda, const HomotopyConfig& cfg, const Vector* x_ref) {
  cfg.validate();
  if (!(lambda > 0.0) || std::isinf(lambda)) throw ConfigError("homotopy_solve: requires finite lambda > 0");
  if (x_ref && x_ref->size() != p.d()) throw ConfigError("homotopy_solve: x_ref must have length d");
  const Index d = p.d(), k = p.k();
  const double scale = p.y().norm() / p.max_col_norm();
  const double sparse_tol = static_cast<double>(k) * cfg.eps_x;
  const double wsparse_tol = static_cast<double>(d - k) * cfg.eps_w;

  Solution sol;
  sol.lambda = lambda;
  MmResult m = mm_solve(p, lambda, 0.0, Vector::Zero(d), cfg);
  Vector x = m.x, dual = m.dual;
  sol.trace.push_back({0.0, m.objective, trimmed_lasso(x, k)});

  const double spread = top_minus_bottom(x, k);
  const double gamma1 =
      spread > 0.0 ? cfg.delta0 / spread : cfg.delta0 / (scale + std::numeric_limits<double>::epsilon());

  auto start_point = [&](double gamma) -> Vector {
    if (!x_ref) return x;
    const double f_ref = objective_value(p, *x_ref, lambda, gamma, cfg.power);
    const double f_cur = objective_value(p, x, lambda, gamma, cfg.power);
    return f_ref < f_cur ? *x_ref : x;
  };

  double gamma_prev = 0.0;
  std::vector<Index> prev_support;
  int same_count = 0, wsparse_count = 0;
  for (int r = 1; r <= cfg.max_gamma_steps; ++r) {
    const double gamma_nominal = r == 1 ? gamma1 : gamma_prev * (1.0 + cfg.delta_gamma);
    const bool big = r > 1 && r % cfg.n_gamma == 0;
    double gamma = big ? gamma_prev * (1.0 + cfg.delta_gamma_big) : gamma_nominal;
    MmResult mr = mm_solve(p, lambda, gamma, start_point(gamma), cfg, dual.size() ? &dual : nullptr);
    if (big && (mr.x - x).lpNorm<1>() > scale * cfg.eps_x) {
      gamma = gamma_nominal;
      mr = mm_solve(p, lambda, gamma, start_point(gamma), cfg, dual.size() ? &dual : nullptr);
    }
    x = std::move(mr.x);
    if (mr.dual.size()) dual = std::move(mr.dual);
    gamma_prev = gamma;
    const double defect = trimmed_lasso(x, k);
    sol.trace.push_back({gamma, mr.objective, defect});

    if (defect <= sparse_tol) {
      auto support = top_k_support(x, k);
      same_count = same_count > 0 && same_support(support, prev_support) ? same_count + 1 : 1;
      prev_support = std::move(support);
    } else {
      same_count = 0;
      prev_support.clear();
    }
    const Vector w = tau_and_weights(x, k, gamma).w;
    wsparse_count = trimmed_lasso(w, d - k) <= wsparse_tol ? wsparse_count + 1 : 0;
    if (same_count >= cfg.sparse_stop_iters || wsparse_count >= cfg.wsparse_stop_iters) break;
  }

  MmResult mf = mm_solve(p, lambda, kInf, x, cfg, dual.size() ? &dual : nullptr);
  sol.trace.push_back({kInf, mf.objective, trimmed_lasso(mf.x, k)});
  sol.x = postprocess_ambiguous(p, mf.x, lambda, cfg.postprocess, cfg.power);
  sol.objective = objective_value(p, sol.x, lambda, kInf, cfg.power);
  sol.gamma_final = kInf;
  sol.x_sparse = project_and_refit(p, sol.x);
  sol.residual_norm = (p.A() * sol.x_sparse - p.y()).norm();
  return sol;
}

void P0Config::validate() const {
  homotopy.validate();
  if (grid_size < 2) throw ConfigError("P0Config: grid_size must be >= 2");
  if (early_stop_count < 1) throw ConfigError("P0Config: early_stop_count must be >= 1");
  if (threads < 1) throw ConfigError("P0Config: threads must be >= 1");
  if (!(delta_lambda > 0.0 && delta_lambda < 1.0)) throw ConfigError("P0Config: delta_lambda must lie in (0, 1)");
  if (!(lambda_a_floor > 0.0 && lambda_a_floor < 1.0)) throw ConfigError("P0Config: lambda_a_floor must lie in (0, 1)");
}

std::vector<double> lambda_grid(const ProblemInstance& p, const P0Config& cfg) {
  cfg.validate();
  const PenaltyThresholds th = thresholds(p);
  const double dl = cfg.delta_lambda;
  std::vector<double> grid;
  if (cfg.grid == GridKind::Coarse) {
    const double top = cfg.homotopy.power == Power::Two ? th.lambda_bar : th.lambda_b;
    for (int i = 1; i <= 7; ++i) grid.push_back(std::pow(10.0, -3.0 * (7 - i) / 6.0) * (1.0 + dl) * top);
    return grid;
  }
  const int N = cfg.grid_size;
  if (cfg.homotopy.power == Power::Two) {
    for (int i = 1; i <= N; ++i)
      grid.push_back(std::pow(10.0, -8.0 * (N - i) / (N - 1.0)) * (1.0 + dl) * th.lambda_bar);
    return grid;
  }
  const double la = th.lambda_a > 0.0 ? th.lambda_a : cfg.lambda_a_floor * th.lambda_b;
  const double lb = th.lambda_b;
  const double base = std::atan((1.0 - dl) / (1.0 + dl) * la / lb);
  for (int i = 1; i <= N; ++i) {
    const double s = (N - i) / (N - 1.0), u = (i - 1) / (N - 1.0);
    grid.push_back((1.0 + dl) * lb * std::tan(s * base + u * std::numbers::pi / 4.0));
  }
  return grid;
}

P0Result solve_p0(const ProblemInstance& p, const P0Config& cfg, const std::optional<std::vector<double>>& grid_in) {
  cfg.validate();
  const std::vector<double> grid = grid_in ? *grid_in : lambda_grid(p, cfg);
  if (grid.empty()) throw ConfigError("solve_p0: empty lambda grid");
  const double sparse_tol = static_cast<double>(p.k()) * cfg.homotopy.eps_x;
  P0Result out;
  if (cfg.threads > 1) {
    out.runs.resize(grid.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.threads));
    std::vector<std::thread> pool;
    for (int t = 0; t < cfg.threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = next++; i < grid.size(); i = next++) out.runs[i] = homotopy_solve(p, grid[i], cfg.homotopy);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    int sparse_run = 0;
    for (double lambda : grid) {
      out.runs.push_back(homotopy_solve(p, lambda, cfg.homotopy));
      const bool sparse = trimmed_lasso(out.runs.back().x, p.k()) <= sparse_tol;
      sparse_run = sparse ? sparse_run + 1 : 0;
      if (!cfg.early_stop) continue;
      if (cfg.grid == GridKind::Coarse ? sparse : sparse_run >= cfg.early_stop_count) break;
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < out.runs.size(); ++i)
    if (out.runs[i].residual_norm < out.runs[best].residual_norm) best = i;
  out.best = out.runs[best];
  return out;
}

}  // namespace gsm
