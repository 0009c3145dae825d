#include "gsm/kernel.hpp"

#include "gsm/detail/recursions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gsm {

namespace {

void require_finite(const Vector& z, const char* what) {
  if (!z.allFinite()) throw NumericError(std::string(what) + ": input contains non-finite entries");
}

detail::BTableT<double> to_internal(const BTable& t) {
  detail::BTableT<double> out;
  out.b = t.b;
  out.zs = t.zsorted;
  out.n = t.n;
  return out;
}

BTable to_public(detail::BTableT<double>&& t, std::vector<Index>&& perm) {
  BTable out;
  out.b = std::move(t.b);
  out.zsorted = std::move(t.zs);
  out.n = t.n;
  out.permutation = std::move(perm);
  return out;
}

// Sorted prefix z_(0..s) with z_(0) = +inf.
std::vector<double> sorted_prefix(const Vector& z, Index s) {
  std::vector<double> tmp(z.data(), z.data() + z.size());
  s = std::min<Index>(s, z.size());
  std::partial_sort(tmp.begin(), tmp.begin() + s, tmp.end(), std::greater<double>());
  std::vector<double> out(static_cast<std::size_t>(s + 1));
  out[0] = kInf;
  for (Index q = 1; q <= s; ++q) out[q] = tmp[static_cast<std::size_t>(q - 1)];
  return out;
}

}  // namespace

MuBTable mu_btable(const Vector& z, Index k, Index s, double gamma) {
  const Index d = z.size();
  if (!(1 <= k && k <= s && s <= d)) throw ConfigError("mu_btable: requires 1 <= k <= s <= d");
  if (!(gamma > 0.0) || std::isinf(gamma)) throw ConfigError("mu_btable: requires 0 < gamma < inf");
  require_finite(z, "mu_btable");
  detail::BTableT<double> t;
  build_btable(z.data(), d, s, gamma, t);
  MuBTable out;
  out.mu = detail::mu_from_btable(t, k, gamma);
  out.btable = to_public(std::move(t), {});
  return out;
}

GsmKernelResult mu_theta(const Vector& z, Index k, double gamma) {
  const Index d = z.size();
  if (d < 1) throw ConfigError("mu_theta: empty input");
  if (k < 0 || k > d / 2) throw ConfigError("mu_theta: requires 0 <= k <= floor(d/2)");
  if (std::isnan(gamma) || gamma < 0.0) throw ConfigError("mu_theta: requires gamma in [0, inf]");
  require_finite(z, "mu_theta");
  auto core = detail::mu_theta_dispatch<double>(z.data(), d, k, gamma);
  GsmKernelResult res;
  res.mu = core.mu;
  res.theta = Eigen::Map<const Vector>(core.theta.data(), d);
  res.btable = to_public(std::move(core.full), std::move(core.permutation));
  res.clamp_excursion = core.clamp_excursion;
  if (!std::isfinite(res.mu) || !res.theta.allFinite()) throw NumericError("mu_theta: non-finite result");
  return res;
}

GsmKernelResult mu_theta_full(const Vector& z, Index k, double gamma) {
  const Index d = z.size();
  if (k < 0 || k > d) throw ConfigError("mu_theta_full: requires 0 <= k <= d");
  if (std::isnan(gamma)) throw ConfigError("mu_theta_full: gamma is NaN");
  if (gamma < 0.0) {
    GsmKernelResult r = mu_theta_full(Vector(-z), k, -gamma);
    r.mu = -r.mu;
    return r;
  }
  if (k <= d / 2) return mu_theta(z, k, gamma);
  require_finite(z, "mu_theta_full");
  GsmKernelResult r = mu_theta(Vector(-z), d - k, gamma);
  detail::CompensatedSum<double> acc;
  for (Index i = 0; i < d; ++i) acc.add(z[i]);
  acc.add(r.mu);
  r.mu = acc.value();
  r.theta = (1.0 - r.theta.array()).matrix();
  return r;
}

double theta_forward(Index i, Index k, double gamma, const BTable& bt, const Vector& z) {
  if (k < 1 || static_cast<Index>(bt.b.size()) < k + 1) throw ConfigError("theta_forward: b-table too short");
  return detail::theta_forward(z[i], k, gamma, to_internal(bt), detail::forward_coefficients<double>(k, bt.n));
}

std::vector<double> theta_backward_left(Index i, Index k, double gamma, const BTable& bt_left, const Vector& zL) {
  const Index dl = zL.size();
  if (static_cast<Index>(bt_left.b.size()) != dl + 1) throw ConfigError("theta_backward_left: b-table must have s = len(zL)");
  if (k < 1 || k > dl) throw ConfigError("theta_backward_left: requires 1 <= k <= len(zL)");
  std::vector<double> th;
  detail::theta_backward_left(zL[i], k, dl, gamma, to_internal(bt_left), detail::left_coefficients<double>(k, dl), th);
  return th;
}

std::vector<double> delta_table(const Vector& u, const Vector& v, Index k) {
  if (k < 1 || k > u.size()) throw ConfigError("delta_table: requires 1 <= k <= len(u)");
  Vector z(u.size() + v.size());
  z << u, v;
  return detail::delta_table(sorted_prefix(z, k), sorted_prefix(u, k), sorted_prefix(v, k), k, v.size());
}

double two_set_binom(Index m, Index n, Index q, Index t) {
  if (m < 0 || n < 0 || q < 0 || q > m + n) throw ConfigError("two_set_binom: invalid arguments");
  if (t < 0 || t > q) return 0.0;
  return std::exp(detail::log_two_set_binom<double>(m, n, q)[t]);
}

double theta_convert(Index k, double gamma, const BTable& full, const BTable& left, const BTable& right,
                     const std::vector<double>& delta, const std::vector<double>& theta_left) {
  const Index dl = left.n, dr = right.n;
  const auto la = detail::log_two_set_binom<double>(dl, dr, k);
  return detail::theta_convert(k, dr, gamma, to_internal(full), to_internal(left), to_internal(right), la, delta,
                               theta_left);
}

PenaltyWeights tau_and_weights(const Vector& x, Index k, double gamma) {
  const Index d = x.size();
  if (k < 0 || k >= d) throw ConfigError("tau_and_weights: requires 0 <= k < d");
  if (std::isnan(gamma)) throw ConfigError("tau_and_weights: gamma is NaN");
  require_finite(x, "tau_and_weights");
  const Vector z = x.cwiseAbs();
  PenaltyWeights out;
  if (gamma == 0.0) {
    detail::CompensatedSum<double> acc;
    for (Index i = 0; i < d; ++i) acc.add(z[i]);
    out.tau = acc.value() * (static_cast<double>(d - k) / static_cast<double>(d));
    out.w = Vector::Constant(d, static_cast<double>(d - k) / static_cast<double>(d));
    return out;
  }
  if (std::isinf(gamma) && gamma > 0.0) {
    // Exact trimmed lasso with fractional tie weights.
    out.w = Vector::Ones(d);
    if (k == 0) {
      out.tau = z.sum();
      return out;
    }
    std::vector<double> tmp(z.data(), z.data() + d);
    std::nth_element(tmp.begin(), tmp.begin() + (k - 1), tmp.end(), std::greater<double>());
    const double zk = tmp[static_cast<std::size_t>(k - 1)];
    Index above = 0, ties = 0;
    detail::CompensatedSum<double> acc;
    for (Index i = 0; i < d; ++i) {
      if (z[i] > zk)
        ++above;
      else if (z[i] == zk)
        ++ties;
      else
        acc.add(z[i]);
    }
    const Index tie_out = ties - (k - above);
    acc.add(zk * static_cast<double>(tie_out));
    out.tau = acc.value();
    const double frac = static_cast<double>(tie_out) / static_cast<double>(ties);
    for (Index i = 0; i < d; ++i) {
      if (z[i] > zk)
        out.w[i] = 0.0;
      else if (z[i] == zk)
        out.w[i] = frac;
    }
    return out;
  }
  GsmKernelResult r = mu_theta_full(z, d - k, -gamma);
  out.tau = r.mu;
  out.w = std::move(r.theta);
  return out;
}

}  // namespace gsm
