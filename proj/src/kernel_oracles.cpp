#include "gsm/kernel_oracles.hpp"

#include "gsm/detail/recursions.hpp"
#include "gsm/kernel.hpp"

#include <cmath>
#include <vector>

namespace gsm {

namespace {

double log_binomial(Index n, Index k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

// Calls f(indices) for every k-subset of {0..d-1} in lexicographic order.
template <class F>
void for_each_subset(Index d, Index k, F&& f) {
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) idx[j] = j;
  while (true) {
    f(idx);
    Index j = k - 1;
    while (j >= 0 && idx[j] == d - k + j) --j;
    if (j < 0) return;
    ++idx[j];
    for (Index l = j + 1; l < k; ++l) idx[l] = idx[l - 1] + 1;
  }
}

}  // namespace

MuTheta brute_force_mu_theta(const Vector& z, Index k, double gamma, double max_subsets) {
  const Index d = z.size();
  if (k < 0 || k > d) throw ConfigError("brute_force_mu_theta: requires 0 <= k <= d");
  if (std::isnan(gamma)) throw ConfigError("brute_force_mu_theta: gamma is NaN");
  if (log_binomial(d, k) > std::log(max_subsets)) throw ConfigError("brute_force_mu_theta: too many subsets");
  MuTheta out;
  out.theta = Vector::Zero(d);
  if (k == 0) return out;

  std::vector<double> sums;
  std::vector<std::vector<Index>> members;
  for_each_subset(d, k, [&](const std::vector<Index>& idx) {
    detail::CompensatedSum<long double> acc;
    for (Index i : idx) acc.add(z[i]);
    sums.push_back(static_cast<double>(acc.value()));
    members.push_back(idx);
  });
  const std::size_t count = sums.size();

  if (gamma == 0.0) {
    detail::CompensatedSum<long double> acc;
    for (Index i = 0; i < d; ++i) acc.add(z[i]);
    out.mu = static_cast<double>(acc.value() * k / d);
    out.theta.setConstant(static_cast<double>(k) / static_cast<double>(d));
    return out;
  }

  double ref = sums[0];
  for (double s : sums) ref = gamma > 0.0 ? std::max(ref, s) : std::min(ref, s);

  if (std::isinf(gamma)) {
    std::size_t hits = 0;
    std::vector<long double> cnt(static_cast<std::size_t>(d), 0.0L);
    for (std::size_t s = 0; s < count; ++s) {
      if (sums[s] != ref) continue;
      ++hits;
      for (Index i : members[s]) cnt[i] += 1.0L;
    }
    out.mu = ref;
    for (Index i = 0; i < d; ++i) out.theta[i] = static_cast<double>(cnt[i] / hits);
    return out;
  }

  detail::CompensatedSum<long double> em1;
  detail::CompensatedSum<long double> total;
  std::vector<detail::CompensatedSum<long double>> num(static_cast<std::size_t>(d));
  for (std::size_t s = 0; s < count; ++s) {
    const long double e = static_cast<long double>(gamma) * (static_cast<long double>(sums[s]) - ref);
    em1.add(std::expm1(e));
    const long double p = std::exp(e);
    total.add(p);
    for (Index i : members[s]) num[i].add(p);
  }
  const long double mean_em1 = em1.value() / static_cast<long double>(count);
  out.mu = static_cast<double>(static_cast<long double>(ref) + std::log1p(mean_em1) / gamma);
  for (Index i = 0; i < d; ++i) out.theta[i] = static_cast<double>(num[i].value() / total.value());
  return out;
}

MuTheta naive_recursion_mu_theta(const Vector& z, Index k, double gamma) {
  const Index d = z.size();
  if (k < 0 || k > d) throw ConfigError("naive_recursion_mu_theta: requires 0 <= k <= d");
  if (!(gamma > 0.0) || std::isinf(gamma)) throw ConfigError("naive_recursion_mu_theta: requires 0 < gamma < inf");
  MuTheta out;
  out.theta = Vector::Zero(d);
  if (k == 0) return out;
  const double zmax = z.maxCoeff();
  const double range = zmax - z.minCoeff();
  if (gamma * range * static_cast<double>(k) > 600.0)
    throw NumericError("naive_recursion_mu_theta: outside the overflow-safe regime");
  Vector x(d);
  for (Index i = 0; i < d; ++i) x[i] = std::exp(gamma * (z[i] - zmax));
  // s_q = e_q(x); t_q^i = x_i e_{q-1}(x without i).
  Vector t = x;
  double s = x.sum();
  for (Index q = 2; q <= k; ++q) {
    for (Index i = 0; i < d; ++i) t[i] = (s - t[i]) * x[i];
    s = t.sum() / static_cast<double>(q);
  }
  out.mu = static_cast<double>(k) * zmax + (std::log(s) - log_binomial(d, k)) / gamma;
  out.theta = t / s;
  return out;
}

HighPrecMuTheta highprec_mu_theta(const Vector& z, Index k, double gamma) {
  const Index d = z.size();
  if (d < 1 || k < 0 || k > d / 2) throw ConfigError("highprec_mu_theta: requires 0 <= k <= floor(d/2)");
  if (std::isnan(gamma) || gamma < 0.0) throw ConfigError("highprec_mu_theta: requires gamma in [0, inf]");
  if (!z.allFinite()) throw NumericError("highprec_mu_theta: non-finite input");
  auto core = detail::mu_theta_dispatch<dd::DoubleDouble>(z.data(), d, k, gamma);
  HighPrecMuTheta out;
  out.mu = core.mu;
  out.rounded.mu = static_cast<double>(core.mu);
  out.rounded.theta.resize(d);
  for (Index i = 0; i < d; ++i) out.rounded.theta[i] = static_cast<double>(core.theta[i]);
  return out;
}

}  // namespace gsm
