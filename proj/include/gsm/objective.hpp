#pragma once

// Trimmed-lasso objectives, projections, penalty thresholds and majorizers.

#include "gsm/types.hpp"

#include <memory>
#include <mutex>
#include <vector>

namespace gsm {

class ProblemInstance {
 public:
  ProblemInstance(Matrix A, Vector y, Index k);

  const Matrix& A() const { return A_; }
  const Vector& y() const { return y_; }
  Index k() const { return k_; }
  Index n() const { return A_.rows(); }
  Index d() const { return A_.cols(); }
  const Vector& col_norms() const { return col_norms_; }
  double max_col_norm() const { return max_col_norm_; }
  // Upper bound on ||A||_2^2.
  double spec_norm_sq() const { return spec_norm_sq_; }
  // n-th singular value of A (0 when rank deficient); computed on first use.
  double sigma_n() const;

 private:
  struct Lazy {
    std::once_flag once;
    double sigma_n = 0.0;
  };
  Matrix A_;
  Vector y_;
  Index k_;
  Vector col_norms_;
  double max_col_norm_ = 0.0;
  double spec_norm_sq_ = 0.0;
  std::shared_ptr<Lazy> lazy_;
};

struct PenaltyThresholds {
  double lambda_bar = 0.0;  // ||y|| max_i ||a_i||
  double lambda_a = 0.0;    // sigma_n(A) / sqrt(d - k)
  double lambda_b = 0.0;    // max_i ||a_i||
};

PenaltyThresholds thresholds(const ProblemInstance& p);

// Sum of the d - k smallest magnitudes.
double trimmed_lasso(const Vector& x, Index k);

// Indices of the k largest magnitudes (ties by lowest index), ascending.
std::vector<Index> top_k_support(const Vector& x, Index k);

// Keeps the k largest-magnitude entries, zeros elsewhere.
Vector proj_k(const Vector& x, Index k);

// tau_k(x) <= k * eps.
bool is_k_sparse(const Vector& x, Index k, double eps = 1e-6);

// ||x||_0 <= k for exact zeros.
Index count_nonzeros(const Vector& x);

// 1/2 ||Ax - y||^2 (power 2) or ||Ax - y|| (power 1).
double residual_term(const ProblemInstance& p, const Vector& x, Power power);
double residual_term_from(const Vector& residual, Power power);

// Residual term + lambda tau_{k,gamma}(x).
double objective_value(const ProblemInstance& p, const Vector& x, double lambda, double gamma, Power power);

// Residual term + lambda (tau_{k,gamma}(x_ref) + <w(x_ref), |x| - |x_ref|>).
double majorizer_value(const ProblemInstance& p, const Vector& x, const Vector& x_ref, double lambda, double gamma,
                       Power power);

// min over 2k-supports S of sigma_min(A_S) / sqrt(2k); requires C(d, 2k) <= budget.
double alpha2k_lower_bound(const ProblemInstance& p, double budget = 1e5);

}  // namespace gsm
