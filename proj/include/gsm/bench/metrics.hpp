#pragma once

#include "gsm/types.hpp"

namespace gsm {

struct RecoveryMetrics {
  double norm_obj = 0.0;   // ||A xh - y|| / ||A x0 - y||
  double rec_err = 0.0;    // ||xh - x0||_1 / ||x0||_1
  double supp_prec = 0.0;  // |supp xh  intersect  supp x0| / |supp x0|
  bool success_obj = false;  // norm_obj <= 1
  bool success_rec = false;  // rec_err <= max(2 nu, 1e-3)
};

// With a reference residual below 1e-12 ||y||, norm_obj is 1 when xh fits to
// the same tolerance and +inf otherwise.
RecoveryMetrics evaluate_recovery(const Matrix& A, const Vector& y, const Vector& x_hat, const Vector& x0, double nu);

}  // namespace gsm
