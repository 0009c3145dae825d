#pragma once

// Convex weighted-l1 subproblems
//
//   power 2:  1/2 ||Ax - y||^2 - <c, x> + lambda <w, |x|>
//   power 1:  ||Ax - y|| + lambda <w, |x|>
//
// and least squares restricted to a support.

#include "gsm/objective.hpp"
#include "gsm/types.hpp"

#include <vector>

namespace gsm {

struct InnerSolverConfig {
  int max_iters = 2000;
  double rel_obj_tol = 1e-10;
  double abs_grad_tol = 1e-9;
  int restart_every = 100;  // 0 disables periodic momentum restarts

  void validate() const;
};

struct Wl1Result {
  Vector x;
  Vector dual;              // power 1 only: dual point in the unit ball
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
  double gap = 0.0;         // power 1: duality gap; power 2: largest KKT violation
};

// Monotone FISTA on a working set grown from KKT violators. `linear` is the
// optional vector c.
Wl1Result solve_wl1_power2(const ProblemInstance& p, const Vector& w, double lambda, const Vector& x0,
                           const InnerSolverConfig& cfg = {}, const Vector* linear = nullptr);

// Primal-dual splitting with adaptive step balancing and a duality-gap stop.
// `u0` optionally warm-starts the dual.
Wl1Result solve_wl1_power1(const ProblemInstance& p, const Vector& w, double lambda, const Vector& x0,
                           const InnerSolverConfig& cfg = {}, const Vector* u0 = nullptr);

// Dual lower bound for the power-1 problem from any u: u is projected onto the
// null space of the near-zero-weight columns and scaled to feasibility.
double power1_dual_bound(const ProblemInstance& p, const Vector& w, double lambda, const Vector& u);

// Zero off the support; on it the minimum-norm least-squares fit.
Vector least_squares_on_support(const ProblemInstance& p, const std::vector<Index>& support);

}  // namespace gsm
