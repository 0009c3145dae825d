#pragma once

// Competing solvers: DC programming and ADMM for the trimmed lasso, IRLS and
// IRL1 for l_p regularization, LS-OMP and a lasso sweep.

#include "gsm/objective.hpp"
#include "gsm/types.hpp"
#include "gsm/wl1_solver.hpp"

#include <string>
#include <vector>

namespace gsm {

struct BaselineResult {
  Vector x;
  std::vector<double> objectives;  // per accepted iteration, starting at the initial point
  int iterations = 0;
  bool converged = false;
};

// 1/2 ||Ax - y||^2 + lambda tau_k(x) + eta ||x||_1.
double trimmed_lasso_objective(const ProblemInstance& p, const Vector& x, double lambda, double eta);

struct DcConfig {
  int max_outer = 200;
  double rel_tol = 1e-8;
  InnerSolverConfig inner{};

  void validate() const;
};

BaselineResult dc_trimmed_lasso(const ProblemInstance& p, double lambda, double eta, const Vector& x0,
                                const DcConfig& cfg = {});

struct AdmmConfig {
  double rho = 1.0;
  bool adapt_rho = true;
  int max_iters = 1000;
  double tol = 1e-8;

  void validate() const;
};

// Exact prox of (lambda tau_k + eta ||.||_1) / rho at v.
Vector trimmed_lasso_prox(const Vector& v, Index k, double lambda, double eta, double rho);

// Returns the split variable z, which carries the sparsity.
BaselineResult admm_trimmed_lasso(const ProblemInstance& p, double lambda, double eta, const Vector& x0,
                                  const AdmmConfig& cfg = {});

struct LpConfig {
  double eps0 = 1.0;
  double eps_min = 1e-8;
  double alpha_eps = 0.9;
  double stall_rel = 1e-3;   // objective decrease counted as a stall
  int stall_iters = 3;
  int sparse_stop_iters = 10;
  double eps_x = 1e-6;
  int max_iters = 1000;
  InnerSolverConfig inner{};

  void validate() const;
};

// argmin ||x||_1 s.t. Ax = y when the system is consistent and full row rank,
// least squares otherwise.
Vector l1_feasibility_init(const ProblemInstance& p);

// 1/2 ||Ax - y||^2 + lambda sum |x_i|^pexp.
double lp_objective(const ProblemInstance& p, const Vector& x, double lambda, double pexp);

BaselineResult irls(const ProblemInstance& p, double lambda, double pexp, const Vector& x_init,
                    const LpConfig& cfg = {});
BaselineResult irl1(const ProblemInstance& p, double lambda, double pexp, const Vector& x_init,
                    const LpConfig& cfg = {});

// k-sparse least-squares solution chosen greedily.
Vector ls_omp(const ProblemInstance& p, Index k);

// 61-point grid ||A^T y||_inf * 10^(-6 j / 60), j = 0..60, descending.
std::vector<double> lasso_grid(const ProblemInstance& p);

// Warm-started lasso solutions along `grid`, in grid order.
std::vector<Vector> lasso_sweep(const ProblemInstance& p, const std::vector<double>& grid,
                                const InnerSolverConfig& cfg = {});

enum class LpMethod { Irls, Irl1 };

struct LpSweepConfig {
  std::vector<double> p_grid{1e-8, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> lambda_grid;  // empty: 1e-8 * 1.5^(i-1), i = 1..90
  LpConfig lp{};

  void validate() const;
};

std::vector<double> default_lp_lambda_grid();

// Best projected and refit candidate, by residual norm, over a set of
// candidate vectors.
Vector best_refit(const ProblemInstance& p, const std::vector<Vector>& candidates);

Vector lp_sweep(const ProblemInstance& p, LpMethod method, const LpSweepConfig& cfg = {});

}  // namespace gsm
