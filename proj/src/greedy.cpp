#include "gsm/greedy.hpp"

#include "gsm/wl1_solver.hpp"

#include <algorithm>
#include <cmath>

namespace gsm {

namespace {

void check_support(const ProblemInstance& p, const std::vector<Index>& support, Index k) {
  if (k < 0 || k > std::min(p.n(), p.d())) throw ConfigError("greedy completion: requires 0 <= k <= min(n, d)");
  for (Index i : support)
    if (i < 0 || i >= p.d()) throw ConfigError("greedy completion: index out of range");
}

}  // namespace

std::vector<Index> ls_omp_complete(const ProblemInstance& p, std::vector<Index> support, Index k) {
  check_support(p, support, k);
  const Index d = p.d();
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  // Columns and residual orthogonalized against the current support.
  Matrix P = p.A();
  Vector r = p.y();
  std::vector<bool> used(static_cast<std::size_t>(d), false);
  const Vector norms_sq = p.A().colwise().squaredNorm().transpose();
  auto absorb = [&](Index j) {
    const double nq = P.col(j).norm();
    if (nq <= 1e-12 * std::sqrt(norms_sq[j])) return;
    const Vector q = P.col(j) / nq;
    r -= q * q.dot(r);
    P.noalias() -= q * (q.transpose() * P);
  };
  for (Index i : support) {
    used[i] = true;
    absorb(i);
  }
  while (static_cast<Index>(support.size()) < k) {
    const Vector corr = P.transpose() * r;
    Index best = -1;
    double score = -1.0;
    for (Index j = 0; j < d; ++j) {
      if (used[j]) continue;
      const double nsq = P.col(j).squaredNorm();
      const double s = nsq > 1e-24 * norms_sq[j] ? corr[j] * corr[j] / nsq : 0.0;
      if (s > score) {
        score = s;
        best = j;
      }
    }
    if (best < 0) break;
    used[best] = true;
    support.push_back(best);
    absorb(best);
  }
  std::sort(support.begin(), support.end());
  return support;
}

std::vector<Index> omp_complete(const ProblemInstance& p, const Vector& x, std::vector<Index> support, Index k) {
  check_support(p, support, k);
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  std::vector<bool> used(static_cast<std::size_t>(p.d()), false);
  for (Index i : support) used[i] = true;
  Vector cur = x;
  while (static_cast<Index>(support.size()) < k) {
    const Vector corr = p.A().transpose() * (p.A() * cur - p.y());
    Index best = -1;
    double score = -1.0;
    for (Index j = 0; j < p.d(); ++j)
      if (!used[j] && std::abs(corr[j]) > score) {
        score = std::abs(corr[j]);
        best = j;
      }
    if (best < 0) break;
    used[best] = true;
    support.push_back(best);
    std::sort(support.begin(), support.end());
    cur = least_squares_on_support(p, support);
  }
  return support;
}

}  // namespace gsm
