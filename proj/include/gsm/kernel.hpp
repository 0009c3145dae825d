#pragma once

// Generalized soft-min kernel: mu_{k,gamma}(z), theta_{k,gamma}(z) = grad mu,
// and through them the penalty tau_{k,gamma}(x) and its weight vector.
//
//   mu_{k,gamma}(z) = (1/gamma) log( mean over k-subsets S of exp(gamma * sum_S z) )
//
// with the limits (k/d) sum z at gamma = 0 and the max / min k-sum at +-inf.

#include "gsm/types.hpp"

#include <vector>

namespace gsm {

struct BTable {
  std::vector<double> b;         // b[q] for q = 0..s, b[0] = 0
  std::vector<double> zsorted;   // z_(q) for q = 0..s, z_(0) = +inf
  std::vector<Index> permutation;  // partition order used (position -> original index); may be empty
  Index n = 0;                   // length of the source vector
};

struct GsmKernelResult {
  double mu = 0.0;
  Vector theta;
  BTable btable;
  double clamp_excursion = 0.0;  // largest |theta| correction applied by clamping to [0,1]
};

struct MuBTable {
  double mu = 0.0;
  BTable btable;
};

// b-table over z (any order) for orders 0..s; 1 <= k <= s <= d, 0 < gamma < inf.
MuBTable mu_btable(const Vector& z, Index k, Index s, double gamma);

// 0 <= k <= d/2, gamma in [0, inf].
GsmKernelResult mu_theta(const Vector& z, Index k, double gamma);

// Any 0 <= k <= d and gamma in [-inf, inf], reduced to mu_theta through the
// complement and sign identities.
GsmKernelResult mu_theta_full(const Vector& z, Index k, double gamma);

// Forward recursion for theta^i; bt must be the b-table of z with s >= k.
double theta_forward(Index i, Index k, double gamma, const BTable& bt, const Vector& z);

// theta_q^i(zL) for q = 0..k; bt_left must be the b-table of zL with s = len(zL).
std::vector<double> theta_backward_left(Index i, Index k, double gamma, const BTable& bt_left, const Vector& zL);

// Delta_{k,t}(u, v) = M_k([u,v]) - M_t(u) - M_{k-t}(v), t = 0..k, where M_q is
// the sum of the q largest entries. Entries with t < k - len(v) are zero.
std::vector<double> delta_table(const Vector& u, const Vector& v, Index k);

// C(m,t) C(n,q-t) / C(m+n,q).
double two_set_binom(Index m, Index n, Index q, Index t);

// theta^i(z) for z = [zL, zR] from the b-tables of z (s >= k), zL (s = len(zL))
// and zR (s >= min(k, len(zR))), the Delta table and theta_q^i(zL).
double theta_convert(Index k, double gamma, const BTable& full, const BTable& left, const BTable& right,
                     const std::vector<double>& delta, const std::vector<double>& theta_left);

struct PenaltyWeights {
  double tau = 0.0;
  Vector w;
};

// tau_{k,gamma}(x) = mu_{d-k,-gamma}(|x|) and w = theta_{d-k,-gamma}(|x|); 0 <= k < d.
PenaltyWeights tau_and_weights(const Vector& x, Index k, double gamma);

}  // namespace gsm
