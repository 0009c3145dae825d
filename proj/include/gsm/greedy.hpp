#pragma once

// Greedy support completion shared by post-processing and the baselines.

#include "gsm/objective.hpp"
#include "gsm/types.hpp"

#include <vector>

namespace gsm {

// Least-squares OMP: starting from `support`, repeatedly adds the column whose
// inclusion minimizes the refit residual until the support has size k.
std::vector<Index> ls_omp_complete(const ProblemInstance& p, std::vector<Index> support, Index k);

// OMP: repeatedly adds argmax_i |<a_i, Ax - y>| with x the current refit; the
// first step uses `x` itself.
std::vector<Index> omp_complete(const ProblemInstance& p, const Vector& x, std::vector<Index> support, Index k);

}  // namespace gsm
