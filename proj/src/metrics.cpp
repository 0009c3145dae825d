#include "gsm/bench/metrics.hpp"

#include <algorithm>

namespace gsm {

RecoveryMetrics evaluate_recovery(const Matrix& A, const Vector& y, const Vector& x_hat, const Vector& x0, double nu) {
  if (x_hat.size() != A.cols() || x0.size() != A.cols() || y.size() != A.rows())
    throw ConfigError("evaluate_recovery: size mismatch");
  const double x0_l1 = x0.lpNorm<1>();
  if (!(x0_l1 > 0.0)) throw ConfigError("evaluate_recovery: x0 must be nonzero");
  RecoveryMetrics m;
  const double r_hat = (A * x_hat - y).norm(), r0 = (A * x0 - y).norm();
  const double zero_tol = 1e-12 * y.norm();
  if (r0 > zero_tol)
    m.norm_obj = r_hat / r0;
  else
    m.norm_obj = r_hat <= zero_tol ? 1.0 : kInf;
  m.rec_err = (x_hat - x0).lpNorm<1>() / x0_l1;
  Index common = 0, k = 0;
  for (Index i = 0; i < x0.size(); ++i) {
    if (x0[i] == 0.0) continue;
    ++k;
    if (x_hat[i] != 0.0) ++common;
  }
  m.supp_prec = static_cast<double>(common) / static_cast<double>(k);
  m.success_obj = m.norm_obj <= 1.0;
  m.success_rec = m.rec_err <= std::max(2.0 * nu, 1e-3);
  return m;
}

}  // namespace gsm
