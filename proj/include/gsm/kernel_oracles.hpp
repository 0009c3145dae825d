#pragma once

// Reference evaluations of mu_{k,gamma} and theta_{k,gamma} used as test
// oracles: direct subset enumeration, the elementary symmetric polynomial
// recursion, and the stable algorithm run in double-double arithmetic.

#include "gsm/double_double.hpp"
#include "gsm/types.hpp"

namespace gsm {

struct MuTheta {
  double mu = 0.0;
  Vector theta;
};

// Enumerates all k-subsets; requires C(d,k) <= max_subsets. Any gamma in [-inf, inf].
MuTheta brute_force_mu_theta(const Vector& z, Index k, double gamma, double max_subsets = 1e6);

// t_q^i = (s_{q-1} - t_{q-1}^i) exp(gamma z_i), s_q = (1/q) sum_i t_q^i.
// Throws NumericError when gamma * range(z) * k is large enough to underflow.
MuTheta naive_recursion_mu_theta(const Vector& z, Index k, double gamma);

struct HighPrecMuTheta {
  dd::DoubleDouble mu;
  MuTheta rounded;
};

// Double-double evaluation; same domain as mu_theta.
HighPrecMuTheta highprec_mu_theta(const Vector& z, Index k, double gamma);

}  // namespace gsm
