#pragma once

// Majorization-minimization at fixed gamma, the gamma homotopy, ambiguity
// post-processing and the lambda sweep for best subset selection.

#include "gsm/objective.hpp"
#include "gsm/types.hpp"
#include "gsm/wl1_solver.hpp"

#include <optional>
#include <vector>

namespace gsm {

enum class PostprocessMode { Auto, LsOmp, OmpStep, None };

struct HomotopyConfig {
  double delta0 = 1e-4;
  double delta_gamma = 0.02;
  double delta_gamma_big = 9.0;
  int n_gamma = 10;
  double eps_x = 1e-6;
  double eps_w = 1e-5;
  double mm_rel_tol_single = 1e-6;
  double mm_rel_tol_double = 1e-3;
  int sparse_stop_iters = 10;
  int wsparse_stop_iters = 4;
  Power power = Power::Two;
  int mm_max_iters = 1000;
  int max_gamma_steps = 20000;
  InnerSolverConfig inner_power2{};
  InnerSolverConfig inner_power1{20000, 1e-9, 1e-9, 100};
  PostprocessMode postprocess = PostprocessMode::Auto;

  void validate() const;
};

struct TracePoint {
  double gamma = 0.0;
  double objective = 0.0;
  double sparsity_defect = 0.0;  // tau_k(x_r)
};

struct Solution {
  Vector x;
  Vector x_sparse;
  double lambda = 0.0;
  double objective = 0.0;       // F_lambda(x) at gamma = inf
  double residual_norm = 0.0;   // ||A x_sparse - y||
  double gamma_final = kInf;
  std::vector<TracePoint> trace;
};

struct MmResult {
  Vector x;
  Vector dual;                  // power 1 only
  double objective = 0.0;       // F_{lambda,gamma}(x)
  int iterations = 0;
  std::vector<double> objectives;  // F after each accepted iteration, starting with F(x0)
};

// Minimizes F_{lambda,gamma} from x0; gamma = 0 is a single convex solve.
MmResult mm_solve(const ProblemInstance& p, double lambda, double gamma, const Vector& x0,
                  const HomotopyConfig& cfg = {}, const Vector* dual0 = nullptr);

// Homotopy in gamma from 0 to inf at fixed lambda. With x_ref, each MM run
// starts from x_ref whenever it has the lower surrogate objective.
Solution homotopy_solve(const ProblemInstance& p, double lambda, const HomotopyConfig& cfg = {},
                        const Vector* x_ref = nullptr);

// |x|_(k) - |x|_(k+1) <= 1e-9 (|x|_(1) + 1e-300).
bool is_ambiguous(const Vector& x, Index k);

// Greedy support completion to size k for ambiguous x; the completed vector
// is returned only if its gamma = inf objective is lower.
Vector postprocess_ambiguous(const ProblemInstance& p, const Vector& x, double lambda, PostprocessMode mode,
                             Power power);

// Top-k projection followed by least squares on that support.
Vector project_and_refit(const ProblemInstance& p, const Vector& x);

enum class GridKind { Standard, Coarse };

struct P0Config {
  HomotopyConfig homotopy{};
  GridKind grid = GridKind::Standard;
  int grid_size = 50;
  bool early_stop = true;
  int early_stop_count = 7;
  int threads = 1;              // > 1 runs the whole grid in parallel without early stopping
  double delta_lambda = 1e-4;
  double lambda_a_floor = 1e-3;  // power 1 grid: lower end relative to lambda_b when lambda_a = 0

  void validate() const;
};

// Ascending lambda grid.
std::vector<double> lambda_grid(const ProblemInstance& p, const P0Config& cfg);

struct P0Result {
  Solution best;
  std::vector<Solution> runs;   // in grid order, only the lambdas evaluated
};

P0Result solve_p0(const ProblemInstance& p, const P0Config& cfg = {},
                  const std::optional<std::vector<double>>& grid = std::nullopt);

}  // namespace gsm
