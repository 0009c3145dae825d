#include "gsm/baselines.hpp"

#include "gsm/greedy.hpp"
#include "gsm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace gsm {

namespace {

double soft(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

void check_lambda(double lambda, double eta, const char* who) {
  if (!(lambda >= 0.0) || !(eta >= 0.0) || std::isinf(lambda) || std::isinf(eta))
    throw ConfigError(std::string(who) + ": requires finite lambda, eta >= 0");
}

// Solves (A^T A + diag(c)) x = b for c > 0, through the smaller system.
class DiagRidge {
 public:
  DiagRidge(const Matrix& A, const Vector& c) : A_(A), cinv_(c.cwiseInverse()) {
    if (A.rows() < A.cols()) {
      Matrix M = A * cinv_.asDiagonal() * A.transpose();
      M.diagonal().array() += 1.0;
      llt_.compute(M);
    } else {
      Matrix M = A.transpose() * A;
      M.diagonal() += c;
      llt_.compute(M);
    }
    if (llt_.info() != Eigen::Success) throw NumericError("ridge solve: factorization failed");
  }

  Vector solve(const Vector& b) const {
    if (A_.rows() < A_.cols()) {
      const Vector cb = cinv_.cwiseProduct(b);
      return cb - cinv_.cwiseProduct(A_.transpose() * llt_.solve(A_ * cb));
    }
    return llt_.solve(b);
  }

 private:
  const Matrix& A_;
  Vector cinv_;
  Eigen::LLT<Matrix> llt_;
};

bool same_support(const Vector& a, const Vector& b, Index k) { return top_k_support(a, k) == top_k_support(b, k); }

// Shared reweighting loop for IRLS and IRL1. `step` returns the next iterate
// for weights built from x at the current epsilon; `value` is the smoothed
// objective that step majorizes at that epsilon.
template <class Step, class Value>
BaselineResult reweight(const ProblemInstance& p, const Vector& x_init, const LpConfig& cfg, Step&& step,
                        Value&& value) {
  const Index k = p.k();
  const double sparse_tol = static_cast<double>(k) * cfg.eps_x;
  BaselineResult res;
  Vector x = x_init;
  double eps = cfg.eps0;
  double F = value(x, eps);
  res.objectives.push_back(F);
  int stall = 0, sparse_run = 0;
  Vector prev_sparse;
  for (int t = 0; t < cfg.max_iters; ++t) {
    Vector xn = step(x, eps);
    if (!xn.allFinite()) throw NumericError("reweighting: non-finite iterate");
    ++res.iterations;
    const double Fn = value(xn, eps);
    stall = Fn > (1.0 - cfg.stall_rel) * F ? stall + 1 : 0;
    x = std::move(xn);
    F = Fn;
    res.objectives.push_back(F);
    if (trimmed_lasso(x, k) <= sparse_tol) {
      sparse_run = sparse_run > 0 && same_support(x, prev_sparse, k) ? sparse_run + 1 : 1;
      prev_sparse = x;
    } else {
      sparse_run = 0;
    }
    if (sparse_run >= cfg.sparse_stop_iters) {
      res.converged = true;
      break;
    }
    if (stall >= cfg.stall_iters) {
      std::vector<double> a(static_cast<std::size_t>(x.size()));
      for (Index i = 0; i < x.size(); ++i) a[i] = std::abs(x[i]);
      std::nth_element(a.begin(), a.begin() + k, a.end(), std::greater<double>());
      eps = std::min(eps, cfg.alpha_eps * a[k]);
      stall = 0;
      if (eps < cfg.eps_min) {
        res.converged = true;
        break;
      }
      F = value(x, eps);
    }
  }
  res.x = std::move(x);
  return res;
}

}  // namespace

double trimmed_lasso_objective(const ProblemInstance& p, const Vector& x, double lambda, double eta) {
  return 0.5 * (p.A() * x - p.y()).squaredNorm() + lambda * trimmed_lasso(x, p.k()) + eta * x.lpNorm<1>();
}

void DcConfig::validate() const {
  if (max_outer < 1 || !(rel_tol > 0.0)) throw ConfigError("DcConfig: requires max_outer >= 1 and rel_tol > 0");
  inner.validate();
}

BaselineResult dc_trimmed_lasso(const ProblemInstance& p, double lambda, double eta, const Vector& x0,
                                const DcConfig& cfg) {
  cfg.validate();
  check_lambda(lambda, eta, "dc_trimmed_lasso");
  if (x0.size() != p.d()) throw ConfigError("dc_trimmed_lasso: x0 must have length d");
  const Index d = p.d();
  const Vector ones = Vector::Ones(d);
  BaselineResult res;
  Vector x = x0;
  double F = trimmed_lasso_objective(p, x, lambda, eta);
  res.objectives.push_back(F);
  for (int t = 0; t < cfg.max_outer; ++t) {
    // Subgradient of the top-k magnitude sum.
    Vector g = Vector::Zero(d);
    for (Index i : top_k_support(x, p.k()))
      if (x[i] != 0.0) g[i] = lambda * (x[i] > 0.0 ? 1.0 : -1.0);
    Wl1Result r = solve_wl1_power2(p, ones, lambda + eta, x, cfg.inner, &g);
    ++res.iterations;
    const double Fn = trimmed_lasso_objective(p, r.x, lambda, eta);
    if (!(Fn <= F)) {
      res.converged = true;
      break;
    }
    const double rel = (F - Fn) / std::max(std::abs(F), 1e-300);
    x = std::move(r.x);
    F = Fn;
    res.objectives.push_back(F);
    if (rel < cfg.rel_tol) {
      res.converged = true;
      break;
    }
  }
  res.x = std::move(x);
  return res;
}

void AdmmConfig::validate() const {
  if (!(rho > 0.0) || std::isinf(rho)) throw ConfigError("AdmmConfig: rho must be positive");
  if (max_iters < 1 || !(tol > 0.0)) throw ConfigError("AdmmConfig: requires max_iters >= 1 and tol > 0");
}

Vector trimmed_lasso_prox(const Vector& v, Index k, double lambda, double eta, double rho) {
  if (!(rho > 0.0)) throw ConfigError("trimmed_lasso_prox: rho must be positive");
  if (k < 0 || k > v.size()) throw ConfigError("trimmed_lasso_prox: requires 0 <= k <= d");
  // Larger |v_i| gain more from the smaller threshold, so the kept set is a
  // top-k set of v; all tie-consistent choices give the same value.
  Vector z(v.size());
  for (Index i = 0; i < v.size(); ++i) z[i] = soft(v[i], (lambda + eta) / rho);
  for (Index i : top_k_support(v, k)) z[i] = soft(v[i], eta / rho);
  return z;
}

BaselineResult admm_trimmed_lasso(const ProblemInstance& p, double lambda, double eta, const Vector& x0,
                                  const AdmmConfig& cfg) {
  cfg.validate();
  check_lambda(lambda, eta, "admm_trimmed_lasso");
  if (x0.size() != p.d()) throw ConfigError("admm_trimmed_lasso: x0 must have length d");
  const Matrix& A = p.A();
  const Index d = p.d(), k = p.k();
  const Vector Aty = A.transpose() * p.y();
  double rho = cfg.rho;
  auto ridge = std::make_unique<DiagRidge>(A, Vector::Constant(d, rho));
  BaselineResult res;
  Vector x = x0, z = x0, u = Vector::Zero(d);
  res.objectives.push_back(trimmed_lasso_objective(p, z, lambda, eta));
  for (int t = 0; t < cfg.max_iters; ++t) {
    x = ridge->solve(Aty + rho * (z - u));
    const Vector z_prev = z;
    z = trimmed_lasso_prox(x + u, k, lambda, eta, rho);
    u += x - z;
    if (!x.allFinite() || !z.allFinite()) throw NumericError("admm_trimmed_lasso: non-finite iterate");
    ++res.iterations;
    res.objectives.push_back(trimmed_lasso_objective(p, z, lambda, eta));
    const double scale = std::max(1.0, std::max(x.norm(), z.norm()));
    const double primal = (x - z).norm(), dual = rho * (z - z_prev).norm();
    if (primal < cfg.tol * scale && dual < cfg.tol * scale) {
      res.converged = true;
      break;
    }
    // rho is only ever raised; lowering it lets the nonconvex iteration cycle.
    if (cfg.adapt_rho && primal > 10.0 * dual) {
      rho *= 2.0;
      u /= 2.0;
      ridge = std::make_unique<DiagRidge>(A, Vector::Constant(d, rho));
    }
  }
  res.x = std::move(z);
  return res;
}

void LpConfig::validate() const {
  if (!(eps0 > 0.0) || !(eps_min > 0.0) || !(alpha_eps > 0.0 && alpha_eps <= 1.0))
    throw ConfigError("LpConfig: requires eps0, eps_min > 0 and alpha_eps in (0, 1]");
  if (!(stall_rel >= 0.0) || stall_iters < 1 || sparse_stop_iters < 1 || max_iters < 1 || !(eps_x > 0.0))
    throw ConfigError("LpConfig: invalid stopping parameters");
  inner.validate();
}

Vector l1_feasibility_init(const ProblemInstance& p) {
  const double sn = p.sigma_n();
  if (p.n() <= p.d() && sn > 0.0) {
    // Below this level every minimizer of ||Ax - y|| + lambda ||x||_1 interpolates.
    const double lambda = 0.5 * sn / std::sqrt(static_cast<double>(p.d()));
    InnerSolverConfig cfg{20000, 1e-12, 1e-12, 100};
    const Wl1Result r = solve_wl1_power1(p, Vector::Ones(p.d()), lambda, Vector::Zero(p.d()), cfg);
    if ((p.A() * r.x - p.y()).norm() <= 1e-8 * p.y().norm()) return r.x;
  }
  std::vector<Index> all(static_cast<std::size_t>(p.d()));
  for (Index i = 0; i < p.d(); ++i) all[i] = i;
  return least_squares_on_support(p, all);
}

double lp_objective(const ProblemInstance& p, const Vector& x, double lambda, double pexp) {
  return 0.5 * (p.A() * x - p.y()).squaredNorm() + lambda * x.cwiseAbs().array().pow(pexp).sum();
}

namespace {

void check_lp(const ProblemInstance& p, double lambda, double pexp, const Vector& x_init, const char* who) {
  if (!(lambda > 0.0) || std::isinf(lambda)) throw ConfigError(std::string(who) + ": requires finite lambda > 0");
  if (!(pexp > 0.0 && pexp <= 1.0)) throw ConfigError(std::string(who) + ": requires p in (0, 1]");
  if (x_init.size() != p.d()) throw ConfigError(std::string(who) + ": x_init must have length d");
}

}  // namespace

BaselineResult irls(const ProblemInstance& p, double lambda, double pexp, const Vector& x_init, const LpConfig& cfg) {
  cfg.validate();
  check_lp(p, lambda, pexp, x_init, "irls");
  const Vector Aty = p.A().transpose() * p.y();
  auto weights = [&](const Vector& x, double eps) {
    return Vector((x.array().square() + eps * eps).pow(0.5 * pexp - 1.0));
  };
  auto step = [&](const Vector& x, double eps) {
    const DiagRidge ridge(p.A(), 2.0 * lambda * weights(x, eps));
    return ridge.solve(Aty);
  };
  auto value = [&](const Vector& x, double eps) {
    return 0.5 * (p.A() * x - p.y()).squaredNorm() +
           2.0 * lambda / pexp * (x.array().square() + eps * eps).pow(0.5 * pexp).sum();
  };
  return reweight(p, x_init, cfg, step, value);
}

BaselineResult irl1(const ProblemInstance& p, double lambda, double pexp, const Vector& x_init, const LpConfig& cfg) {
  cfg.validate();
  check_lp(p, lambda, pexp, x_init, "irl1");
  auto step = [&](const Vector& x, double eps) {
    Vector w = (x.cwiseAbs().array() + eps).pow(pexp - 1.0);
    const double wmax = w.maxCoeff();
    w /= wmax;
    return solve_wl1_power2(p, w, lambda * wmax, x, cfg.inner).x;
  };
  auto value = [&](const Vector& x, double eps) {
    return 0.5 * (p.A() * x - p.y()).squaredNorm() + lambda / pexp * (x.cwiseAbs().array() + eps).pow(pexp).sum();
  };
  return reweight(p, x_init, cfg, step, value);
}

Vector ls_omp(const ProblemInstance& p, Index k) {
  if (k < 1 || k > std::min(p.n(), p.d())) throw ConfigError("ls_omp: requires 1 <= k <= min(n, d)");
  return least_squares_on_support(p, ls_omp_complete(p, {}, k));
}

std::vector<double> lasso_grid(const ProblemInstance& p) {
  const double top = (p.A().transpose() * p.y()).cwiseAbs().maxCoeff();
  std::vector<double> grid;
  for (int j = 0; j <= 60; ++j) grid.push_back(top * std::pow(10.0, -6.0 * j / 60.0));
  return grid;
}

std::vector<Vector> lasso_sweep(const ProblemInstance& p, const std::vector<double>& grid,
                                const InnerSolverConfig& cfg) {
  if (grid.empty()) throw ConfigError("lasso_sweep: empty grid");
  const Vector ones = Vector::Ones(p.d());
  std::vector<Vector> out;
  Vector x = Vector::Zero(p.d());
  for (double lambda : grid) {
    x = solve_wl1_power2(p, ones, lambda, x, cfg).x;
    out.push_back(x);
  }
  return out;
}

void LpSweepConfig::validate() const {
  if (p_grid.empty()) throw ConfigError("LpSweepConfig: empty p grid");
  for (double q : p_grid)
    if (!(q > 0.0 && q <= 1.0)) throw ConfigError("LpSweepConfig: p must lie in (0, 1]");
  for (double l : lambda_grid)
    if (!(l > 0.0) || std::isinf(l)) throw ConfigError("LpSweepConfig: lambdas must be finite and positive");
  lp.validate();
}

std::vector<double> default_lp_lambda_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 90; ++i) grid.push_back(1e-8 * std::pow(1.5, i - 1));
  return grid;
}

Vector best_refit(const ProblemInstance& p, const std::vector<Vector>& candidates) {
  if (candidates.empty()) throw ConfigError("best_refit: no candidates");
  Vector best;
  double best_res = kInf;
  for (const Vector& c : candidates) {
    Vector x = project_and_refit(p, c);
    const double r = (p.A() * x - p.y()).norm();
    if (r < best_res) {
      best_res = r;
      best = std::move(x);
    }
  }
  return best;
}

Vector lp_sweep(const ProblemInstance& p, LpMethod method, const LpSweepConfig& cfg) {
  cfg.validate();
  const auto lambdas = cfg.lambda_grid.empty() ? default_lp_lambda_grid() : cfg.lambda_grid;
  const Vector init = l1_feasibility_init(p);
  std::vector<Vector> candidates{init};
  for (double q : cfg.p_grid)
    for (double lambda : lambdas)
      candidates.push_back(method == LpMethod::Irls ? irls(p, lambda, q, init, cfg.lp).x
                                                    : irl1(p, lambda, q, init, cfg.lp).x);
  return best_refit(p, candidates);
}

}  // namespace gsm
