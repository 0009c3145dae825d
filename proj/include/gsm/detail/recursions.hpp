#pragma once

// Log-domain recursions for mu_{k,gamma} and theta_{k,gamma}, templated on the
// scalar type so the same code runs in double and in double-double.

#include "gsm/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace gsm::detail {

template <class T>
inline T tmax(const T& a, const T& b) {
  return a < b ? b : a;
}

template <class T>
inline T tmin(const T& a, const T& b) {
  return b < a ? b : a;
}

template <class T>
inline T ratio(Index num, Index den) {
  return T(static_cast<double>(num)) / T(static_cast<double>(den));
}

// Neumaier-compensated accumulator.
template <class T>
struct CompensatedSum {
  T sum = T(0.0);
  T comp = T(0.0);
  void add(const T& v) {
    using std::abs;
    T t = sum + v;
    if (abs(sum) >= abs(v))
      comp = comp + ((sum - t) + v);
    else
      comp = comp + ((v - t) + sum);
    sum = t;
  }
  T value() const { return sum + comp; }
};

template <class T>
struct BTableT {
  std::vector<T> b;   // b[q], q = 0..s
  std::vector<T> zs;  // zs[0] = +inf, zs[q] = q-th largest entry
  Index n = 0;        // length of the vector the table was built from
};

// b-table recursion over z[0..d), processing entries from last to first.
template <class T>
void build_btable(const T* z, Index d, Index s, const T& gamma, BTableT<T>& out) {
  using std::expm1;
  using std::log1p;
  out.b.assign(static_cast<std::size_t>(s + 1), T(0.0));
  out.zs.assign(static_cast<std::size_t>(s + 1), T(kInf));
  out.n = d;
  std::vector<T>& b = out.b;
  std::vector<T>& v = out.zs;
  const T zero(0.0);
  for (Index j = d - 1; j >= 0; --j) {
    const Index m = d - 1 - j;
    const T& zr = z[j];
    const T inv = T(1.0) / T(static_cast<double>(m + 1));
    if (s >= m + 1) {
      v[m + 1] = tmin(zr, v[m]);
      b[m + 1] = zero;
    }
    for (Index q = std::min(s, m); q >= 1; --q) {
      const T vq = tmax(tmin(zr, v[q - 1]), v[q]);
      const T xi = gamma * (zr - v[q]);
      const T eta = b[q] - b[q - 1] - xi;
      T bq;
      if (eta <= zero)
        bq = log1p(T(static_cast<double>(m - q + 1)) * inv * expm1(eta)) + b[q - 1] - tmax(-xi, zero);
      else
        bq = log1p(T(static_cast<double>(q)) * inv * expm1(-eta)) + b[q] - tmax(xi, zero);
      b[q] = bq;
      v[q] = vq;
    }
  }
}

template <class T>
T mu_from_btable(const BTableT<T>& t, Index k, const T& gamma) {
  CompensatedSum<T> acc;
  for (Index q = 1; q <= k; ++q) acc.add(t.zs[q]);
  return t.b[k] / gamma + acc.value();
}

// q / (d - q + 1) for q = 0..k.
template <class T>
std::vector<T> forward_coefficients(Index k, Index d) {
  std::vector<T> c(static_cast<std::size_t>(k + 1), T(0.0));
  for (Index q = 1; q <= k; ++q) c[q] = ratio<T>(q, d - q + 1);
  return c;
}

// theta^i by the forward recursion theta_q = c_q (1 - theta_{q-1}).
template <class T>
T theta_forward(const T& zi, Index k, const T& gamma, const BTableT<T>& full, const std::vector<T>& coef) {
  using std::exp;
  T th(0.0);
  const T one(1.0);
  for (Index q = 1; q <= k; ++q) {
    th = coef[q] * exp(gamma * (zi - full.zs[q]) + full.b[q - 1] - full.b[q]) * (one - th);
  }
  return th;
}

template <class T>
struct LeftCoefficients {
  std::vector<T> forward;    // q / (dL - q + 1), q = 0..k
  std::vector<T> threshold;  // log((dL - q + 1) / q), q = 0..k
  std::vector<T> backward;   // (dL - q) / (q + 1), q = 0..dL
};

template <class T>
LeftCoefficients<T> left_coefficients(Index k, Index dL) {
  using std::log;
  LeftCoefficients<T> c;
  c.forward = forward_coefficients<T>(k, dL);
  c.threshold.assign(static_cast<std::size_t>(k + 1), T(0.0));
  for (Index q = 1; q <= k; ++q) c.threshold[q] = log(ratio<T>(dL - q + 1, q));
  c.backward.assign(static_cast<std::size_t>(dL + 1), T(0.0));
  for (Index q = 0; q < dL; ++q) c.backward[q] = ratio<T>(dL - q, q + 1);
  return c;
}

// theta_q^i(zL) for q = 0..k: forward until c_q exceeds one, then backward
// from theta_{dL} = 1.
template <class T>
void theta_backward_left(const T& zi, Index k, Index dL, const T& gamma, const BTableT<T>& left,
                         const LeftCoefficients<T>& coef, std::vector<T>& th) {
  using std::exp;
  const T one(1.0);
  th.assign(static_cast<std::size_t>(k + 1), T(0.0));
  Index qhat = k + 1;
  for (Index q = 1; q <= k; ++q) {
    const T eta = gamma * (zi - left.zs[q]) + left.b[q - 1] - left.b[q];
    if (eta <= coef.threshold[q]) {
      th[q] = coef.forward[q] * exp(eta) * (one - th[q - 1]);
    } else {
      qhat = q;
      break;
    }
  }
  if (qhat > k) return;
  T cur = one;
  if (dL <= k) th[dL] = one;
  for (Index q = dL - 1; q >= qhat; --q) {
    const T eta = left.b[q + 1] - left.b[q] - gamma * (zi - left.zs[q + 1]);
    cur = one - coef.backward[q] * exp(eta) * cur;
    if (q <= k) th[q] = cur;
  }
}

// Delta_{k,t} = M_k(z) - M_t(u) - M_{k-t}(v) for t = 0..k, from the sorted
// prefixes of the merged vector z = [u, v] and of u and v. Entries outside
// max(0, k - n) <= t <= k are set to zero.
template <class T>
std::vector<T> delta_table(const std::vector<T>& zs, const std::vector<T>& us, const std::vector<T>& vs, Index k,
                           Index n) {
  std::vector<T> delta(static_cast<std::size_t>(k + 1), T(0.0));
  for (Index q = 1; q <= k; ++q) {
    const Index ta = std::max<Index>(0, q - n);
    const Index tb = q;
    for (Index t = tb; t >= std::max<Index>(ta, 1); --t) {
      if (zs[q] >= us[t])
        delta[t] = delta[t - 1] + (zs[q] - us[t]);
      else
        delta[t] = delta[t] + (zs[q] - vs[q - t]);
    }
    if (ta == 0)
      delta[0] = delta[0] + (zs[q] - vs[q]);
    else
      delta[ta - 1] = T(0.0);
  }
  return delta;
}

// log of C(m,t) C(n,q-t) / C(m+n,q) for t = 0..q; -inf outside the support.
template <class T>
std::vector<T> log_two_set_binom(Index m, Index n, Index q) {
  using std::log;
  using std::log1p;
  std::vector<T> out(static_cast<std::size_t>(q + 1), T(-kInf));
  const Index tlo = std::max<Index>(0, q - n);
  const Index thi = std::min(q, m);
  if (tlo > thi) return out;
  T anchor(0.0);
  if (thi == q) {
    // C(m,q)/C(m+n,q) = prod_j (m-j)/(m+n-j)
    for (Index j = 0; j < q; ++j) anchor = anchor + log1p(-ratio<T>(n, m + n - j));
  } else {
    // C(n,q-m)/C(m+n,q) = prod_{j<m} (q-j)/(m+n-j) for t = m
    for (Index j = 0; j < m; ++j) anchor = anchor + log(ratio<T>(q - j, m + n - j));
  }
  out[thi] = anchor;
  for (Index t = thi; t > tlo; --t) {
    const T num = T(static_cast<double>(t)) * T(static_cast<double>(n - q + t));
    const T den = T(static_cast<double>(m - t + 1)) * T(static_cast<double>(q - t + 1));
    out[t - 1] = out[t] + log(num / den);
  }
  return out;
}

// theta^i(z) from theta_t^i(zL) by the two-set binomial expansion.
template <class T>
T theta_convert(Index k, Index dR, const T& gamma, const BTableT<T>& full, const BTableT<T>& left,
                const BTableT<T>& right, const std::vector<T>& log_alpha, const std::vector<T>& delta,
                const std::vector<T>& theta_left) {
  using std::exp;
  T sum(0.0);
  const Index tlo = std::max<Index>(1, k - dR);
  for (Index t = k; t >= tlo; --t) {
    const T e = log_alpha[t] + left.b[t] + right.b[k - t] - full.b[k] - gamma * delta[t];
    sum = sum + exp(e) * theta_left[t];
  }
  return sum;
}

template <class T>
struct CoreResult {
  T mu;
  std::vector<T> theta;  // original order
  BTableT<T> full;
  std::vector<Index> permutation;  // position -> original index
  double clamp_excursion = 0.0;
};

// Partition indices so the dl largest entries (ties by lower index) come first,
// each part keeping original index order.
inline std::vector<Index> top_partition(const double* z, Index d, Index dl) {
  std::vector<Index> idx(static_cast<std::size_t>(d));
  std::iota(idx.begin(), idx.end(), Index{0});
  auto before = [z](Index a, Index b) { return z[a] > z[b] || (z[a] == z[b] && a < b); };
  if (dl <= 0 || dl >= d) return idx;
  std::vector<Index> tmp = idx;
  std::nth_element(tmp.begin(), tmp.begin() + (dl - 1), tmp.end(), before);
  const Index pivot = tmp[static_cast<std::size_t>(dl - 1)];
  std::vector<Index> perm;
  perm.reserve(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i)
    if (i == pivot || before(i, pivot)) perm.push_back(i);
  for (Index i = 0; i < d; ++i)
    if (!(i == pivot || before(i, pivot))) perm.push_back(i);
  return perm;
}

// Finite positive gamma, 1 <= k <= d/2.
template <class T>
CoreResult<T> mu_theta_core(const double* z, Index d, Index k, double gamma_d) {
  using std::log;
  const T gamma(gamma_d);
  const Index dl = std::max<Index>(1, 2 * k - 2);
  const Index dr = d - dl;
  CoreResult<T> res;
  res.permutation = top_partition(z, d, dl);
  std::vector<T> zp(static_cast<std::size_t>(d));
  for (Index p = 0; p < d; ++p) zp[p] = T(z[res.permutation[p]]);

  build_btable(zp.data(), d, k, gamma, res.full);
  BTableT<T> left, right;
  build_btable(zp.data(), dl, dl, gamma, left);
  build_btable(zp.data() + dl, dr, std::min(k, dr), gamma, right);
  const std::vector<T> delta = delta_table(res.full.zs, left.zs, right.zs, k, dr);
  const std::vector<T> log_alpha = log_two_set_binom<T>(dl, dr, k);
  const T threshold = log(ratio<T>(d - k + 1, k));
  const std::vector<T> fcoef = forward_coefficients<T>(k, d);
  const LeftCoefficients<T> lcoef = left_coefficients<T>(k, dl);
  const T safety_base = res.full.b[k - 1] - res.full.b[k];

  res.theta.assign(static_cast<std::size_t>(d), T(0.0));
  std::vector<T> theta_left;
  const T zero(0.0), one(1.0);
  for (Index p = 0; p < d; ++p) {
    const T& zi = zp[p];
    T th;
    if (p >= dl || gamma * (zi - res.full.zs[k]) + safety_base <= threshold) {
      th = theta_forward(zi, k, gamma, res.full, fcoef);
    } else {
      theta_backward_left(zi, k, dl, gamma, left, lcoef, theta_left);
      th = theta_convert(k, dr, gamma, res.full, left, right, log_alpha, delta, theta_left);
    }
    if (th < zero) {
      res.clamp_excursion = std::max(res.clamp_excursion, -static_cast<double>(th));
      th = zero;
    } else if (th > one) {
      res.clamp_excursion = std::max(res.clamp_excursion, static_cast<double>(th - one));
      th = one;
    }
    res.theta[res.permutation[p]] = th;
  }
  res.mu = mu_from_btable(res.full, k, gamma);
  return res;
}

// All of 0 <= k <= d/2 and gamma in [0, inf]; finiteness already checked.
template <class T>
CoreResult<T> mu_theta_dispatch(const double* z, Index d, Index k, double gamma) {
  CoreResult<T> res;
  if (k == 0) {
    res.mu = T(0.0);
    res.theta.assign(static_cast<std::size_t>(d), T(0.0));
    return res;
  }
  if (gamma == 0.0) {
    CompensatedSum<T> acc;
    for (Index i = 0; i < d; ++i) acc.add(T(z[i]));
    res.mu = acc.value() * ratio<T>(k, d);
    res.theta.assign(static_cast<std::size_t>(d), ratio<T>(k, d));
    return res;
  }
  if (std::isinf(gamma)) {
    std::vector<double> tmp(z, z + d);
    std::nth_element(tmp.begin(), tmp.begin() + (k - 1), tmp.end(), std::greater<double>());
    const double zk = tmp[static_cast<std::size_t>(k - 1)];
    Index above = 0, ties = 0;
    CompensatedSum<T> acc;
    for (Index i = 0; i < d; ++i) {
      if (z[i] > zk) {
        ++above;
        acc.add(T(z[i]));
      } else if (z[i] == zk) {
        ++ties;
      }
    }
    acc.add(T(zk) * T(static_cast<double>(k - above)));
    res.mu = acc.value();
    const T frac = ratio<T>(k - above, ties);
    res.theta.assign(static_cast<std::size_t>(d), T(0.0));
    for (Index i = 0; i < d; ++i) {
      if (z[i] > zk)
        res.theta[i] = T(1.0);
      else if (z[i] == zk)
        res.theta[i] = frac;
    }
    return res;
  }
  return mu_theta_core<T>(z, d, k, gamma);
}

}  // namespace gsm::detail
