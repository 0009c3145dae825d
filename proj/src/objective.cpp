#include "gsm/objective.hpp"

#include "gsm/detail/recursions.hpp"
#include "gsm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gsm {

namespace {

double largest_gram_eigenvalue(const Matrix& A) {
  if (std::min(A.rows(), A.cols()) <= 4000) {
    const Matrix G = A.rows() <= A.cols() ? Matrix(A * A.transpose()) : Matrix(A.transpose() * A);
    Eigen::SelfAdjointEigenSolver<Matrix> es(G, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
  }
  Vector v = Vector::Ones(A.cols()) / std::sqrt(static_cast<double>(A.cols()));
  double est = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vector u = A.transpose() * (A * v);
    est = v.dot(u);
    const double nu = u.norm();
    if (nu == 0.0) break;
    v = u / nu;
  }
  return est;
}

}  // namespace

ProblemInstance::ProblemInstance(Matrix A, Vector y, Index k)
    : A_(std::move(A)), y_(std::move(y)), k_(k), lazy_(std::make_shared<Lazy>()) {
  if (A_.rows() < 1 || A_.cols() < 1) throw ConfigError("ProblemInstance: empty matrix");
  if (y_.size() != A_.rows()) throw ConfigError("ProblemInstance: y length must equal the number of rows of A");
  if (!(0 < k_ && k_ < A_.cols())) throw ConfigError("ProblemInstance: requires 0 < k < d");
  if (!A_.allFinite() || !y_.allFinite()) throw NumericError("ProblemInstance: non-finite entries");
  col_norms_ = A_.colwise().norm().transpose();
  if (col_norms_.minCoeff() <= 0.0) throw ConfigError("ProblemInstance: zero column");
  max_col_norm_ = col_norms_.maxCoeff();
  spec_norm_sq_ = 1.01 * largest_gram_eigenvalue(A_);
}

double ProblemInstance::sigma_n() const {
  std::call_once(lazy_->once, [this] {
    if (n() > d()) {
      lazy_->sigma_n = 0.0;
      return;
    }
    Eigen::BDCSVD<Matrix> svd(A_);
    const Vector& s = svd.singularValues();
    const double smin = s[s.size() - 1];
    lazy_->sigma_n = smin > 1e-10 * s[0] ? smin : 0.0;
  });
  return lazy_->sigma_n;
}

PenaltyThresholds thresholds(const ProblemInstance& p) {
  PenaltyThresholds t;
  t.lambda_b = p.max_col_norm();
  t.lambda_bar = p.y().norm() * t.lambda_b;
  t.lambda_a = p.sigma_n() / std::sqrt(static_cast<double>(p.d() - p.k()));
  return t;
}

double trimmed_lasso(const Vector& x, Index k) {
  const Index d = x.size();
  if (k < 0 || k > d) throw ConfigError("trimmed_lasso: requires 0 <= k <= d");
  if (k == d) return 0.0;
  std::vector<double> a(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) a[i] = std::abs(x[i]);
  if (k > 0) std::nth_element(a.begin(), a.begin() + k, a.end(), std::greater<double>());
  detail::CompensatedSum<double> acc;
  for (Index i = k; i < d; ++i) acc.add(a[i]);
  return acc.value();
}

std::vector<Index> top_k_support(const Vector& x, Index k) {
  const Index d = x.size();
  if (k < 0 || k > d) throw ConfigError("top_k_support: requires 0 <= k <= d");
  std::vector<Index> idx(static_cast<std::size_t>(d));
  std::iota(idx.begin(), idx.end(), Index{0});
  auto before = [&x](Index a, Index b) {
    const double xa = std::abs(x[a]), xb = std::abs(x[b]);
    return xa > xb || (xa == xb && a < b);
  };
  if (k > 0 && k < d) std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(), before);
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Vector proj_k(const Vector& x, Index k) {
  Vector out = Vector::Zero(x.size());
  for (Index i : top_k_support(x, k)) out[i] = x[i];
  return out;
}

bool is_k_sparse(const Vector& x, Index k, double eps) {
  return trimmed_lasso(x, k) <= static_cast<double>(k) * eps;
}

Index count_nonzeros(const Vector& x) { return (x.array() != 0.0).count(); }

double residual_term_from(const Vector& residual, Power power) {
  return power == Power::Two ? 0.5 * residual.squaredNorm() : residual.norm();
}

double residual_term(const ProblemInstance& p, const Vector& x, Power power) {
  return residual_term_from(p.A() * x - p.y(), power);
}

double objective_value(const ProblemInstance& p, const Vector& x, double lambda, double gamma, Power power) {
  if (lambda < 0.0) throw ConfigError("objective_value: requires lambda >= 0");
  const double pen = std::isinf(gamma) && gamma > 0.0 ? trimmed_lasso(x, p.k()) : tau_and_weights(x, p.k(), gamma).tau;
  return residual_term(p, x, power) + lambda * pen;
}

double majorizer_value(const ProblemInstance& p, const Vector& x, const Vector& x_ref, double lambda, double gamma,
                       Power power) {
  if (lambda < 0.0) throw ConfigError("majorizer_value: requires lambda >= 0");
  const PenaltyWeights tw = tau_and_weights(x_ref, p.k(), gamma);
  const double lin = tw.w.dot(Vector(x.cwiseAbs() - x_ref.cwiseAbs()));
  return residual_term(p, x, power) + lambda * (tw.tau + lin);
}

double alpha2k_lower_bound(const ProblemInstance& p, double budget) {
  const Index d = p.d(), m = std::min<Index>(2 * p.k(), d);
  const double log_count =
      std::lgamma(d + 1.0) - std::lgamma(static_cast<double>(m) + 1.0) - std::lgamma(static_cast<double>(d - m) + 1.0);
  if (log_count > std::log(budget)) throw ConfigError("alpha2k_lower_bound: too many supports");
  if (m > p.n()) return 0.0;
  std::vector<Index> idx(static_cast<std::size_t>(m));
  std::iota(idx.begin(), idx.end(), Index{0});
  double best = kInf;
  Matrix sub(p.n(), m);
  while (true) {
    for (Index j = 0; j < m; ++j) sub.col(j) = p.A().col(idx[j]);
    Eigen::JacobiSVD<Matrix> svd(sub);
    best = std::min(best, svd.singularValues()[m - 1]);
    Index j = m - 1;
    while (j >= 0 && idx[j] == d - m + j) --j;
    if (j < 0) break;
    ++idx[j];
    for (Index l = j + 1; l < m; ++l) idx[l] = idx[l - 1] + 1;
  }
  return best / std::sqrt(static_cast<double>(2 * p.k()));
}

}  // namespace gsm
